use std::collections::BTreeSet;
use std::fmt::Write as _;

use khkit::khovanov::kh_homology;
use khkit::laurent::bigint_json;
use khkit::polynomials::{jones_bracket, jones_skein};
use khkit::slice::{
    ab_power, catalan, charpoly_sweep, enumerate_matchings, sl2_word_check, transport_study, CrossinglessMatching,
};
use khkit::{BigradedRanks, BraidWord, Error, HalfLaurent, KhovanovReport, LinkDiagram, Result};
use serde_json::{json, Value};

use crate::report::Report;
use crate::Input;

pub const SLICE_BLOCK_CAP: usize = 10;
pub const SL2_CAP: usize = 1000;

#[derive(Clone, Copy, Debug, Default)]
pub struct Caps {
    pub max_crossings: Option<usize>,
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::CapExceeded { .. } | Error::RecursionDepth(_) => 3,
        Error::NotDivisible(_) | Error::NotAComplex(_) | Error::NotAChainMap(_) => 1,
        _ => 2,
    }
}

struct Loaded {
    label: String,
    diagram: LinkDiagram,
    braid: Option<BraidWord>,
    strands: usize,
}

fn load(input: &Input, caps: Caps) -> Result<Loaded> {
    let loaded = if let Some(text) = &input.braid {
        let braid: BraidWord = text.parse()?;
        Loaded { label: braid.to_string(), diagram: braid.closure(), strands: braid.strands(), braid: Some(braid) }
    } else if let Some(path) = &input.pd {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        let diagram = if text.trim_start().starts_with('{') {
            LinkDiagram::parse_pd_json(&text)?
        } else {
            LinkDiagram::parse_pd(&text)?
        };
        Loaded { label: diagram.to_pd(), strands: diagram.seifert_circle_count(), diagram, braid: None }
    } else {
        let n = input.unlink.unwrap_or(1);
        let braid = BraidWord::identity(n)?;
        Loaded { label: format!("unlink {n}"), diagram: LinkDiagram::unlink(n)?, strands: n, braid: Some(braid) }
    };
    check_cap(&loaded.diagram, caps)?;
    Ok(loaded)
}

fn check_cap(d: &LinkDiagram, caps: Caps) -> Result<()> {
    match caps.max_crossings {
        Some(cap) if d.crossing_count() > cap => {
            Err(Error::CapExceeded { what: "crossings", value: d.crossing_count(), cap })
        }
        _ => Ok(()),
    }
}

fn poly_json(p: &HalfLaurent) -> Value {
    json!({"text": p.to_text("t"), "terms": p.to_json()})
}

fn poly_rows(method: &str, p: &HalfLaurent) -> Vec<Vec<String>> {
    p.terms().map(|(k, c)| vec![method.to_string(), k.to_string(), c.to_string()]).collect()
}

pub fn jones(input: &Input, caps: Caps) -> Result<Report> {
    let l = load(input, caps)?;
    let bracket = jones_bracket(&l.diagram)?;
    let skein = jones_skein(&l.diagram)?;
    let agree = bracket == skein;
    let text = format!(
        "input: {}\nbracket: {}\nskein: {}\nagreement: {agree}\n",
        l.label,
        bracket.to_text("t"),
        skein.to_text("t")
    );
    let json = json!({
        "input": l.label,
        "crossings": l.diagram.crossing_count(),
        "bracket": poly_json(&bracket),
        "skein": poly_json(&skein),
        "agreement": agree,
    });
    let mut rows = poly_rows("bracket", &bracket);
    rows.extend(poly_rows("skein", &skein));
    Ok(Report { passed: agree, text, json, header: vec!["method", "half_exponent", "coefficient"], rows })
}

fn torsion_text<T: ToString>(torsion: &[T]) -> String {
    torsion.iter().map(ToString::to_string).collect::<Vec<_>>().join(";")
}

pub fn khovanov(input: &Input, caps: Caps) -> Result<Report> {
    let l = load(input, caps)?;
    let report = KhovanovReport::compute(&l.diagram, l.strands)?;
    let mut text = format!("input: {}\n", l.label);
    text.push_str(&report.bigraded.to_string());
    for (k, h) in &report.collapsed.groups {
        let _ = writeln!(text, "collapsed k={k}: {h} (floer degree {})", report.collapsed.floer_degree(*k));
    }
    let _ = writeln!(text, "euler_jones_check: {}", report.euler_jones_check);

    let mut json = report.to_json();
    json["input"] = Value::from(l.label.clone());
    json["crossings"] = Value::from(l.diagram.crossing_count());

    let mut rows: Vec<Vec<String>> = report
        .bigraded
        .iter()
        .map(|(&(i, j), h)| {
            vec!["bigraded".into(), i.to_string(), j.to_string(), h.free_rank.to_string(), torsion_text(&h.torsion)]
        })
        .collect();
    rows.extend(report.collapsed.groups.iter().map(|(k, h)| {
        vec!["collapsed".into(), k.to_string(), String::new(), h.free_rank.to_string(), torsion_text(&h.torsion)]
    }));
    Ok(Report {
        passed: report.euler_jones_check,
        text,
        json,
        header: vec!["table", "i_or_k", "j", "free", "torsion"],
        rows,
    })
}

fn kh_diff(before: &BigradedRanks, after: &BigradedRanks) -> Vec<String> {
    let keys: BTreeSet<(i64, i64)> = before.iter().chain(after.iter()).map(|(k, _)| *k).collect();
    keys.into_iter()
        .filter_map(|(i, j)| {
            let (a, b) = (before.get(i, j), after.get(i, j));
            (a != b).then(|| format!("Kh^({i},{j}): before {a}, after {b}"))
        })
        .collect()
}

pub fn markov_test(input: &Input, caps: Caps, steps: usize, seed: u64, inject_bug: bool) -> Result<Report> {
    let l = load(input, caps)?;
    let braid = l.braid.ok_or_else(|| Error::Parse("markov-test needs --braid or --unlink".into()))?;
    let walked = braid.random_markov_walk(steps, seed);
    let after_diagram = walked.closure();
    check_cap(&after_diagram, caps)?;

    let jones_before = jones_bracket(&l.diagram)?;
    let mut jones_after = jones_bracket(&after_diagram)?;
    if inject_bug {
        jones_after = jones_after.shift(2);
    }
    let kh_before = kh_homology(&l.diagram)?;
    let kh_after = kh_homology(&after_diagram)?;

    let jones_equal = jones_before == jones_after;
    let kh_changes = kh_diff(&kh_before, &kh_after);
    let khovanov_equal = kh_changes.is_empty();
    let mut diff = Vec::new();
    if !jones_equal {
        diff.push(format!("V: before {}, after {}", jones_before.to_text("t"), jones_after.to_text("t")));
    }
    diff.extend(kh_changes);
    let passed = jones_equal && khovanov_equal;

    let mut text = format!("before: {braid}\nafter: {walked}\nsteps: {steps}\nseed: {seed}\n");
    let _ = writeln!(text, "jones_equal: {jones_equal}\nkhovanov_equal: {khovanov_equal}");
    for line in &diff {
        let _ = writeln!(text, "diff: {line}");
    }
    let _ = writeln!(text, "{}", verdict(passed));
    let json = json!({
        "before": braid.to_string(),
        "after": walked.to_string(),
        "steps": steps,
        "seed": seed,
        "jones_equal": jones_equal,
        "khovanov_equal": khovanov_equal,
        "diff": diff,
        "passed": passed,
    });
    let rows = vec![
        vec!["before".into(), braid.to_string()],
        vec!["after".into(), walked.to_string()],
        vec!["steps".into(), steps.to_string()],
        vec!["seed".into(), seed.to_string()],
        vec!["jones_equal".into(), jones_equal.to_string()],
        vec!["khovanov_equal".into(), khovanov_equal.to_string()],
        vec!["passed".into(), passed.to_string()],
    ];
    Ok(Report { passed, text, json, header: vec!["field", "value"], rows })
}

fn verdict(passed: bool) -> &'static str {
    if passed {
        "pass"
    } else {
        "FAIL"
    }
}

pub fn slice_charpoly(m: usize, trials: usize, seed: u64) -> Result<Report> {
    if m > SLICE_BLOCK_CAP {
        return Err(Error::CapExceeded { what: "block count", value: m, cap: SLICE_BLOCK_CAP });
    }
    if m == 0 {
        return Err(Error::Dimension("at least one block is required".into()));
    }
    let sweep = charpoly_sweep(m, trials, seed);
    let passed = sweep.passed();
    let text = format!("charpoly m={m} trials={trials} failures={}: {}\n", sweep.failures, verdict(passed));
    let json = json!({"m": m, "trials": trials, "seed": seed, "failures": sweep.failures, "passed": passed});
    let rows =
        vec![vec![m.to_string(), trials.to_string(), seed.to_string(), sweep.failures.to_string(), passed.to_string()]];
    Ok(Report { passed, text, json, header: vec!["m", "trials", "seed", "failures", "passed"], rows })
}

pub fn slice_matchings(m: usize) -> Result<Report> {
    let all = enumerate_matchings(m)?;
    let expected = catalan(m);
    let horseshoe = CrossinglessMatching::horseshoe(m);
    let horseshoe_present = all.contains(&horseshoe);
    let noncrossing = all.iter().all(CrossinglessMatching::is_noncrossing);
    let passed = expected == all.len().into() && horseshoe_present && noncrossing;

    let mut text = format!("matchings m={m} count={} catalan={expected}\n", all.len());
    for x in &all {
        let _ = writeln!(text, "{x}");
    }
    let _ = writeln!(text, "horseshoe present: {horseshoe_present}\n{}", verdict(passed));
    let json = json!({
        "m": m,
        "count": all.len(),
        "catalan": bigint_json(&expected),
        "horseshoe_present": horseshoe_present,
        "matchings": all.iter().map(CrossinglessMatching::to_json).collect::<Vec<_>>(),
        "passed": passed,
    });
    let rows = all.iter().enumerate().map(|(i, x)| vec![i.to_string(), x.to_string()]).collect();
    Ok(Report { passed, text, json, header: vec!["index", "pairs"], rows })
}

pub fn slice_transport(seed: u64) -> Result<Report> {
    let study = transport_study(seed)?;
    let passed = study.passed();
    let mut text = format!("transport seed={seed}\nreturn error: {:e}\n", study.return_error);
    for (steps, drift) in &study.drift {
        let _ = writeln!(text, "rk4 steps={steps} fibre drift={drift:e}");
    }
    let _ = writeln!(
        text,
        "order slope: {:.4} (nominal {})\nintegrator gap: {:e}\nadaptive fibre error: {:e}\n{}",
        study.order_slope,
        study.nominal_order,
        study.integrator_gap,
        study.adaptive_fibre_error,
        verdict(passed)
    );
    let mut json = serde_json::to_value(&study).expect("plain data");
    json["seed"] = Value::from(seed);
    json["passed"] = Value::from(passed);
    let mut rows = vec![
        vec!["return_error".into(), study.return_error.to_string()],
        vec!["order_slope".into(), study.order_slope.to_string()],
        vec!["integrator_gap".into(), study.integrator_gap.to_string()],
        vec!["adaptive_fibre_error".into(), study.adaptive_fibre_error.to_string()],
    ];
    rows.extend(study.drift.iter().map(|(s, d)| vec![format!("drift_{s}"), d.to_string()]));
    rows.push(vec!["passed".into(), passed.to_string()]);
    Ok(Report { passed, text, json, header: vec!["quantity", "value"], rows })
}

pub fn slice_sl2(n: usize) -> Result<Report> {
    if n > SL2_CAP {
        return Err(Error::CapExceeded { what: "word exponent", value: n, cap: SL2_CAP });
    }
    let identity = [[1, 0], [0, 1]];
    let checks: Vec<(usize, bool, bool)> = (1..=n)
        .map(|k| {
            let truncations = (6 * k - 5..6 * k).all(|j| ab_power(j) != identity);
            (k, sl2_word_check(k), truncations)
        })
        .collect();
    let passed = checks.iter().all(|&(_, a, b)| a && b);
    let mut text = String::new();
    for (k, id, tr) in &checks {
        let _ = writeln!(text, "n={k} (AB)^{}=I: {id} truncations non-identity: {tr}", 6 * k);
    }
    let _ = writeln!(text, "{}", verdict(passed));
    let json = json!({
        "n": n,
        "checks": checks.iter().map(|&(k, id, tr)| json!({"n": k, "identity": id, "truncations_non_identity": tr})).collect::<Vec<_>>(),
        "passed": passed,
    });
    let rows = checks.iter().map(|(k, id, tr)| vec![k.to_string(), id.to_string(), tr.to_string()]).collect();
    Ok(Report { passed, text, json, header: vec!["n", "identity", "truncations_non_identity"], rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn braid(w: &str) -> Input {
        Input { braid: Some(w.into()), pd: None, unlink: None }
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::CapExceeded { what: "x", value: 2, cap: 1 }), 3);
        assert_eq!(exit_code(&Error::Parse("x".into())), 2);
        assert_eq!(exit_code(&Error::InvalidBraid("x".into())), 2);
        assert_eq!(exit_code(&Error::NotDivisible("x".into())), 1);
    }

    #[test]
    fn unlink_input_is_an_identity_braid() {
        let l = load(&Input { braid: None, pd: None, unlink: Some(3) }, Caps::default()).unwrap();
        assert_eq!(l.strands, 3);
        assert_eq!(l.braid.unwrap().to_string(), "3:");
        assert!(load(&Input { braid: None, pd: None, unlink: Some(0) }, Caps::default()).is_err());
    }

    #[test]
    fn crossing_cap() {
        let caps = Caps { max_crossings: Some(2) };
        assert!(matches!(jones(&braid("2: 1 1 1"), caps), Err(Error::CapExceeded { .. })));
        assert!(jones(&braid("2: 1 1"), caps).unwrap().passed);
    }

    #[test]
    fn injected_bug_is_reported() {
        let clean = markov_test(&braid("3: 1 -2"), Caps::default(), 10, 3, false).unwrap();
        assert!(clean.passed);
        let bad = markov_test(&braid("3: 1 -2"), Caps::default(), 10, 3, true).unwrap();
        assert!(!bad.passed);
        assert_eq!(bad.json["khovanov_equal"], true);
    }

    #[test]
    fn slice_reports() {
        assert!(slice_matchings(4).unwrap().json["count"] == 14);
        assert_eq!(slice_sl2(0).unwrap().rows.len(), 0);
        assert!(matches!(slice_sl2(SL2_CAP + 1), Err(Error::CapExceeded { .. })));
        assert!(matches!(slice_charpoly(SLICE_BLOCK_CAP + 1, 1, 0), Err(Error::CapExceeded { .. })));
        assert!(slice_charpoly(0, 1, 0).is_err());
    }
}
