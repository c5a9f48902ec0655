//! Cross-module property checks that tie the analysis pipeline together:
//! projection robustness, screen independence, agreement between the
//! geometric classifiers and the rank computations, and the stability of
//! the serialized interfaces.

use num_traits::Zero;
use serde_json::Value;

use conelab::analysis::{
    classify_cc2, cone_property, project_general, projection_ci_property, sample_point,
    sample_screen, GenericityProtocol,
};
use conelab::catalog::{entries, make_grid, random_config, ConfigKind};
use conelab::geometry::{collinear_subsets, project, PointConfig};
use conelab::ideals::{binomial, h_vector, hilbert_function, ideal_dim};
use conelab::report::{analyze, format_point_file, parse_point_file, OutputFormat};

#[test]
fn projections_avoid_secants_for_all_builtin_configurations() {
    let protocol = GenericityProtocol::default();
    for entry in entries().expect("catalog loads") {
        for trial in 0..protocol.trials as u64 {
            let (_, _, image) = project_general(&entry.config, &protocol, trial)
                .unwrap_or_else(|e| panic!("{} trial {trial}: {e}", entry.name));
            assert_eq!(
                image.len(),
                entry.config.len(),
                "{} trial {trial}: projection must preserve cardinality",
                entry.name
            );
            assert_eq!(image.ambient_dim(), 2);
        }
    }
}

#[test]
fn image_invariants_do_not_depend_on_the_screen() {
    let protocol = GenericityProtocol::default();
    let cfg = entries().expect("catalog loads").remove(3).config;
    let mut rng = protocol.stream("screen-independence", 0);
    let center = sample_point(&mut rng, protocol.height);
    let first = sample_screen(&center, &mut rng);
    let second = sample_screen(&center, &mut rng);
    let img1 = project(&cfg, &center, &first).expect("first screen projects");
    let img2 = project(&cfg, &center, &second).expect("second screen projects");
    assert_eq!(h_vector(&img1).values, h_vector(&img2).values);
    for d in 1..=5 {
        assert_eq!(
            ideal_dim(&img1, d),
            ideal_dim(&img2, d),
            "ideal dimension at degree {d} depends on the screen"
        );
    }
}

#[test]
fn planar_configurations_never_have_unexpected_cones() {
    let protocol = GenericityProtocol::default();
    for rep in 0..8u64 {
        let n = 4 + (rep as usize % 6);
        let mut rng = protocol.stream("planar-gap", rep);
        let cfg = random_config(&ConfigKind::Planar(n), &mut rng, 100).expect("planar sample");
        for d in 2..=6 {
            let report = cone_property(&cfg, d, &protocol).expect("cone report");
            assert!(report.planar, "sample rep {rep} not flagged planar");
            assert_eq!(
                report.actual_dim, report.clamped_expected,
                "rep {rep} (n={n}, d={d}): planar gap must vanish"
            );
            assert!(!report.unexpected, "rep {rep} (n={n}, d={d}): unexpected on a plane");
        }
    }
}

#[test]
fn unexpected_cones_mean_dependent_conditions_on_the_image() {
    let protocol = GenericityProtocol::default();
    let mut exercised = 0usize;
    for entry in entries().expect("catalog loads") {
        let n = entry.config.len() as i64;
        for d in 2..=6u32 {
            let report = cone_property(&entry.config, d, &protocol).expect("cone report");
            if !report.unexpected {
                continue;
            }
            for trial in 0..protocol.trials as u64 {
                let (_, _, image) =
                    project_general(&entry.config, &protocol, trial).expect("projection");
                let plane_dim = ideal_dim(&image, d) as i64;
                let independent = binomial(u64::from(d) + 2, 2) as i64 - n;
                assert!(
                    plane_dim > independent,
                    "{} d={d} trial {trial}: image imposes independent conditions \
                     ({plane_dim} <= {independent}) despite an unexpected cone",
                    entry.name
                );
            }
            exercised += 1;
        }
    }
    assert!(exercised >= 3, "only {exercised} unexpected instances exercised");
}

/// Nine points that fail to impose independent conditions on cubics, and
/// are not covered by two skew lines, never carry extra cubic cones and
/// never project to a complete intersection.
#[test]
fn dependent_cubic_conditions_without_a_skew_cover_preclude_degree_three_cones() {
    let protocol = GenericityProtocol::default();
    let line = |k: i64| -> Vec<Vec<i64>> { (0..k).map(|t| vec![1, t, 0, 0]).collect() };
    let mut cases: Vec<(&str, Vec<Vec<i64>>)> = Vec::new();
    let mut with_extras = |name, k: i64, extras: &[[i64; 4]]| {
        let mut rows = line(k);
        rows.extend(extras.iter().map(|r| r.to_vec()));
        cases.push((name, rows));
    };
    with_extras(
        "five collinear plus four spanning",
        5,
        &[[0, 0, 1, 0], [0, 0, 0, 1], [1, 1, 1, 1], [1, 2, 4, 8]],
    );
    with_extras("six collinear plus three", 6, &[[0, 0, 1, 0], [0, 0, 0, 1], [1, 1, 1, 1]]);
    with_extras("seven collinear plus two", 7, &[[0, 0, 1, 0], [0, 0, 0, 1]]);
    with_extras(
        "five and three on skew lines plus one",
        5,
        &[[0, 0, 1, 0], [0, 0, 1, 1], [0, 0, 1, 2], [1, 1, 1, 1]],
    );
    // Eight points on a plane conic plus one point off the plane.
    let mut conic: Vec<Vec<i64>> = (0..8).map(|t| vec![1, t, t * t, 0]).collect();
    conic.push(vec![0, 0, 0, 1]);
    cases.push(("eight on a conic plus one", conic));

    for (name, rows) in cases {
        let borrowed: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
        let cfg = PointConfig::from_i64(&borrowed);
        assert_eq!(cfg.len(), 9, "{name}: not nine points");
        assert!(
            hilbert_function(&cfg, 3) < 9,
            "{name}: conditions on cubics are independent; case is vacuous"
        );
        assert!(
            classify_cc2(&cfg).expect("classification").is_none(),
            "{name}: covered by two skew lines"
        );
        let report = cone_property(&cfg, 3, &protocol).expect("cone report");
        assert!(
            !report.unexpected,
            "{name}: unexpected cubic cone (actual {}, expected {})",
            report.actual_dim, report.clamped_expected
        );
        let ci = projection_ci_property(&cfg, &protocol, None).expect("projection scan");
        assert_eq!(ci.type_pair, None, "{name}: projection certified {:?}", ci.type_pair);
    }
}

/// Most nine-point shapes carry extra cones in at most one of the degrees
/// 2 and 3. The boundary is a 4+5 split across two skew lines, which has
/// both: the two covering planes give a quadric, and the same planes times
/// anything linear give a net of cubics against an expected pencil.
#[test]
fn nine_point_samples_combine_degree_two_and_three_cones_only_on_a_split() {
    let protocol = GenericityProtocol::default();
    let unexpected_pair = |cfg: &PointConfig| {
        let r2 = cone_property(cfg, 2, &protocol).expect("degree 2");
        let r3 = cone_property(cfg, 3, &protocol).expect("degree 3");
        (r2.unexpected, r3.unexpected)
    };

    let kinds = [
        ConfigKind::GeneralPosition(9),
        ConfigKind::Planar(9),
        ConfigKind::OnGridLines(vec![3, 3, 3]),
        ConfigKind::OnGridLines(vec![9]),
        ConfigKind::OnTwoSkewLines(3, 6),
    ];
    for (i, kind) in kinds.iter().enumerate() {
        for rep in 0..2u64 {
            let mut rng = protocol.stream("nine-point", (i as u64) * 2 + rep);
            let cfg = random_config(kind, &mut rng, 100).expect("sample");
            let (u2, u3) = unexpected_pair(&cfg);
            assert!(!(u2 && u3), "{kind:?} rep {rep}: both degrees unexpected");
        }
    }
    let grid = make_grid(3, 3);
    let (u2, u3) = unexpected_pair(&grid);
    assert!(u3 && !u2, "(3,3)-grid: degrees 2/3 unexpected = {u2}/{u3}");

    // Positive control for the boundary case.
    let mut rng = protocol.stream("nine-point-split", 0);
    let split = random_config(&ConfigKind::OnTwoSkewLines(4, 5), &mut rng, 100).expect("sample");
    let (u2, u3) = unexpected_pair(&split);
    assert!(u2 && u3, "4+5 split: degrees 2/3 unexpected = {u2}/{u3}");
}

#[test]
fn trial_dimensions_agree_for_all_builtin_configurations() {
    let protocol = GenericityProtocol::default();
    for entry in entries().expect("catalog loads") {
        for d in 2..=6 {
            let report = cone_property(&entry.config, d, &protocol).expect("cone report");
            assert!(
                report.consistent(),
                "{} d={d}: trial dims {:?}",
                entry.name,
                report.trial_dims
            );
        }
    }
}

/// Two independent quadric cones with a general vertex force all points
/// but at most one onto a single line.
#[test]
fn a_net_of_quadric_cones_needs_near_collinear_points() {
    let protocol = GenericityProtocol::default();
    let line = |k: i64| -> Vec<Vec<i64>> { (0..k).map(|t| vec![1, t, 0, 0]).collect() };
    let mut cases: Vec<Vec<Vec<i64>>> = Vec::new();
    for k in 5..=8 {
        cases.push(line(k));
        let mut plus_one = line(k);
        plus_one.push(vec![0, 0, 1, 0]);
        cases.push(plus_one);
        let mut plus_two = line(k);
        plus_two.push(vec![0, 0, 1, 0]);
        plus_two.push(vec![0, 0, 0, 1]);
        cases.push(plus_two);
    }
    let mut triggered = 0usize;
    for rows in &cases {
        let borrowed: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
        let cfg = PointConfig::from_i64(&borrowed);
        let n = cfg.len();
        assert!(n >= 5);
        let report = cone_property(&cfg, 2, &protocol).expect("cone report");
        if report.actual_dim < 2 {
            continue;
        }
        triggered += 1;
        let longest = collinear_subsets(&cfg, 2).iter().map(|l| l.size()).max().unwrap_or(0);
        assert!(
            longest >= n - 1,
            "{n} points with a net of quadric cones but longest line has {longest}"
        );
    }
    // Sampled shapes with fewer collinear points must stay below a net.
    for rep in 0..4u64 {
        let mut rng = protocol.stream("quadric-net", rep);
        let kind = if rep % 2 == 0 {
            ConfigKind::GeneralPosition(5 + rep as usize)
        } else {
            ConfigKind::OnTwoSkewLines(3, 3 + rep as usize)
        };
        let cfg = random_config(&kind, &mut rng, 100).expect("sample");
        let report = cone_property(&cfg, 2, &protocol).expect("cone report");
        if report.actual_dim >= 2 {
            let longest = collinear_subsets(&cfg, 2).iter().map(|l| l.size()).max().unwrap_or(0);
            assert!(longest >= cfg.len() - 1, "{kind:?}: net without near-collinearity");
        }
    }
    assert!(triggered >= 8, "only {triggered} shapes carried a net of cones");
}

#[test]
fn builtin_configurations_round_trip_through_the_text_format() {
    for entry in entries().expect("catalog loads") {
        let text = format_point_file(&entry.config, &[entry.description]);
        let parsed = parse_point_file(&text).unwrap_or_else(|e| panic!("{}: {e}", entry.name));
        assert_eq!(
            parsed.points(),
            entry.config.points(),
            "{}: round trip changed the points",
            entry.name
        );
    }
}

fn json_type_name(value: &Value) -> &'static str {
    match value {
        Value::Null => "null",
        Value::Bool(_) => "boolean",
        Value::Number(n) if n.is_i64() || n.is_u64() => "integer",
        Value::Number(_) => "number",
        Value::String(_) => "string",
        Value::Array(_) => "array",
        Value::Object(_) => "object",
    }
}

/// Minimal structural validator for the subset of JSON Schema the shipped
/// schema uses: type unions, required keys, closed objects, item schemas,
/// and integer bounds.
fn check_schema(value: &Value, schema: &Value, path: &str) -> Result<(), String> {
    if let Some(ty) = schema.get("type") {
        let allowed: Vec<&str> = match ty {
            Value::String(s) => vec![s.as_str()],
            Value::Array(a) => a.iter().filter_map(Value::as_str).collect(),
            _ => return Err(format!("{path}: malformed type in schema")),
        };
        let actual = json_type_name(value);
        let ok = allowed.iter().any(|&a| a == actual || (a == "number" && actual == "integer"));
        if !ok {
            return Err(format!("{path}: type {actual}, allowed {allowed:?}"));
        }
    }
    match value {
        Value::Null => Ok(()),
        Value::Number(n) => {
            let v = n
                .as_i64()
                .or_else(|| n.as_u64().and_then(|u| i64::try_from(u).ok()))
                .ok_or_else(|| format!("{path}: number out of range"))?;
            if let Some(min) = schema.get("minimum").and_then(Value::as_i64) {
                if v < min {
                    return Err(format!("{path}: {v} below minimum {min}"));
                }
            }
            if let Some(max) = schema.get("maximum").and_then(Value::as_i64) {
                if v > max {
                    return Err(format!("{path}: {v} above maximum {max}"));
                }
            }
            Ok(())
        }
        Value::Object(map) => {
            if let Some(req) = schema.get("required").and_then(Value::as_array) {
                for key in req.iter().filter_map(Value::as_str) {
                    if !map.contains_key(key) {
                        return Err(format!("{path}: missing required key {key}"));
                    }
                }
            }
            let closed = schema.get("additionalProperties").and_then(Value::as_bool) == Some(false);
            let props = schema.get("properties").and_then(Value::as_object);
            for (key, sub) in map {
                match props.and_then(|p| p.get(key)) {
                    Some(subschema) => check_schema(sub, subschema, &format!("{path}.{key}"))?,
                    None if closed => return Err(format!("{path}: unexpected key {key}")),
                    None => {}
                }
            }
            Ok(())
        }
        Value::Array(items) => {
            if let Some(min) = schema.get("minItems").and_then(Value::as_u64) {
                if (items.len() as u64) < min {
                    return Err(format!("{path}: {} items, minimum {min}", items.len()));
                }
            }
            if let Some(max) = schema.get("maxItems").and_then(Value::as_u64) {
                if (items.len() as u64) > max {
                    return Err(format!("{path}: {} items, maximum {max}", items.len()));
                }
            }
            if let Some(sub) = schema.get("items") {
                for (i, item) in items.iter().enumerate() {
                    check_schema(item, sub, &format!("{path}[{i}]"))?;
                }
            }
            Ok(())
        }
        _ => Ok(()),
    }
}

#[test]
fn json_reports_validate_against_the_shipped_schema() {
    let schema: Value =
        serde_json::from_str(include_str!("../docs/report.schema.json")).expect("schema parses");
    let protocol = GenericityProtocol::default();

    // One non-grid entry (null grid branch) and one grid (object branch).
    let entry = entries().expect("catalog loads").remove(2);
    let outcome = analyze(entry.name, &entry.config, 2, 4, &protocol, None).expect("analysis");
    let rendered = outcome.render(OutputFormat::Json);
    let value: Value = serde_json::from_str(&rendered).expect("report is valid JSON");
    check_schema(&value, &schema, "$").unwrap_or_else(|e| panic!("{e}"));
    assert!(value["grid"].is_null());

    let grid = make_grid(3, 4);
    let outcome = analyze("grid", &grid, 2, 4, &protocol, Some((3, 4))).expect("analysis");
    let rendered = outcome.render(OutputFormat::Json);
    let value: Value = serde_json::from_str(&rendered).expect("report is valid JSON");
    check_schema(&value, &schema, "$").unwrap_or_else(|e| panic!("{e}"));
    assert!(value["grid"].is_object());
}

#[test]
fn certified_forms_vanish_on_every_projected_point() {
    let protocol = GenericityProtocol::default();
    let entry = entries().expect("catalog loads").remove(2);
    let res = projection_ci_property(&entry.config, &protocol, None).expect("scan");
    let pair = res.type_pair.expect("a certified type");
    for t in &res.trials {
        let verdict = t.verdicts.iter().find(|v| v.certified).expect("certified verdict per trial");
        assert_eq!(
            (
                verdict.type_pair.0.min(verdict.type_pair.1),
                verdict.type_pair.0.max(verdict.type_pair.1)
            ),
            pair
        );
        let (f, g) = verdict.certificate.as_ref().expect("certificate forms");
        let (_, _, image) =
            project_general(&entry.config, &protocol, t.trial as u64).expect("projection");
        for p in image.points() {
            assert!(f.evaluate(p).is_zero() && g.evaluate(p).is_zero());
        }
        assert!(!f.is_zero() && !g.is_zero());
    }
}
