//! The randomized property suite behind `profact suite`.
//!
//! Case `i` draws from its own ChaCha stream, so cases run in parallel and
//! the report does not depend on scheduling. Reports contain no timings.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::base::{compose, BaseMorphism, BaseObject, DiagramView};
use crate::diagram::{Diagram, NatTrans};
use crate::error::{Error, Result};
use crate::factorize::{chi_construct, functorial_factorization_pro, reedy, verify_chi};
use crate::gen;
use crate::json::{morphism_to_json, nat_trans_to_json, SCHEMA_VERSION};
use crate::lifting::{has_lift_bruteforce, lift_against_special, retract_exhibitor};
use crate::procalc::{
    check_pre_morphism, dominate, eq_in_colim, identity_pm, pm_compose, pm_leq, straighten, ArrowMap, PreMorphism,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// One component of each generated transformation is altered so that
    /// some naturality square fails.
    BrokenNaturality,
}

impl FromStr for Fault {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "broken-naturality" => Ok(Fault::BrokenNaturality),
            _ => Err(Error::Parse {
                location: "fault".into(),
                message: format!("unknown fault `{s}`"),
            }),
        }
    }
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fault::BrokenNaturality => f.write_str("broken-naturality"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub cases: usize,
    pub max_poset: usize,
    pub max_fiber: usize,
    pub inject: Option<Fault>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            cases: 200,
            max_poset: 5,
            max_fiber: 4,
            inject: None,
        }
    }
}

pub const INVARIANTS: &[&str] = &[
    "naturality",
    "matching.oracle",
    "reedy.composite",
    "reedy.left_levelwise_injective",
    "reedy.right_special_surjective",
    "lift.cone",
    "lift.bruteforce",
    "retract.exhibitor",
    "chi.identity",
    "chi.squares",
    "chi.composition",
    "chi.monotone",
    "pm.leq_reflexive",
    "pm.leq_antisymmetric",
    "pm.leq_transitive",
    "pm.compose_associative",
    "pm.compose_unital",
    "pm.compose_monotone",
    "pm.dominate_bound",
    "straighten.valid",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// never evaluated
    Vacuous,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvariantReport {
    pub name: String,
    pub evaluated: usize,
    pub passed: usize,
    /// cases that hit a search or truncation limit
    pub skipped: usize,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub config: SuiteConfig,
    pub passed: bool,
    pub invariants: Vec<InvariantReport>,
}

impl SuiteReport {
    pub fn failed(&self) -> impl Iterator<Item = &InvariantReport> {
        self.invariants.iter().filter(|r| r.verdict == Verdict::Fail)
    }
}

enum Outcome {
    Pass,
    Fail(Value),
    Skip,
}

struct Case {
    out: Vec<(&'static str, Outcome)>,
}

impl Case {
    fn record(&mut self, name: &'static str, r: Result<Option<Value>>) {
        debug_assert!(INVARIANTS.contains(&name));
        let o = match r {
            Ok(None) => Outcome::Pass,
            Ok(Some(v)) => Outcome::Fail(v),
            Err(e) if e.is_resource_limit() => Outcome::Skip,
            Err(e) => Outcome::Fail(json!({ "error": e.to_string() })),
        };
        self.out.push((name, o));
    }

    fn holds(&mut self, name: &'static str, ok: bool, detail: impl FnOnce() -> Value) {
        self.record(name, Ok((!ok).then(detail)));
    }
}

pub fn case_rng(seed: u64, case: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case as u64);
    rng
}

pub fn run_suite(cfg: &SuiteConfig) -> SuiteReport {
    let results: Vec<(usize, Vec<(&'static str, Outcome)>)> = (0..cfg.cases)
        .into_par_iter()
        .map(|i| (i, run_case(cfg, i)))
        .collect();
    let mut invariants = Vec::with_capacity(INVARIANTS.len());
    for &name in INVARIANTS {
        let mut r = InvariantReport {
            name: name.to_string(),
            evaluated: 0,
            passed: 0,
            skipped: 0,
            verdict: Verdict::Vacuous,
            counterexample: None,
        };
        // results are in case order
        for (i, outs) in &results {
            for (n, o) in outs {
                if *n != name {
                    continue;
                }
                match o {
                    Outcome::Pass => {
                        r.evaluated += 1;
                        r.passed += 1;
                    }
                    Outcome::Fail(v) => {
                        r.evaluated += 1;
                        if r.counterexample.is_none() {
                            r.counterexample = Some(json!({ "case": i, "detail": v }));
                        }
                    }
                    Outcome::Skip => r.skipped += 1,
                }
            }
        }
        r.verdict = if r.evaluated == 0 {
            Verdict::Vacuous
        } else if r.passed == r.evaluated {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        invariants.push(r);
    }
    SuiteReport {
        schema_version: SCHEMA_VERSION,
        config: cfg.clone(),
        passed: invariants.iter().all(|r| r.verdict != Verdict::Fail),
        invariants,
    }
}

fn run_case(cfg: &SuiteConfig, idx: usize) -> Vec<(&'static str, Outcome)> {
    let mut c = Case { out: Vec::new() };
    if cfg.max_poset == 0 || cfg.max_fiber == 0 {
        return c.out;
    }
    let mut rng = case_rng(cfg.seed, idx);
    let n = rng.gen_range(1..=cfg.max_poset);
    let shape = Arc::new(gen::random_poset(&mut rng, n, 0.5));
    let f = gen::random_nat_trans(&mut rng, shape, cfg.max_fiber);

    let mut comps = f.components().to_vec();
    if cfg.inject == Some(Fault::BrokenNaturality) {
        break_naturality(&mut rng, &f, &mut comps);
    }
    let bad = naturality_failure(f.source(), f.target(), &comps);
    c.record("naturality", Ok(bad));

    let oracle = (0..n).try_for_each(|x| {
        let fast = f.relative_matching_map(x).1;
        let slow = f.relative_matching_map_via_limits(x)?;
        let agree = fast.target().len() == slow.target().len()
            && fast.is_injective() == slow.is_injective()
            && fast.is_surjective() == slow.is_surjective();
        if agree {
            Ok(())
        } else {
            Err(Error::Internal(format!("matching maps disagree at `{}`", f.shape().name(x))))
        }
    });
    c.record("matching.oracle", oracle.map(|_| None));

    let rf = match reedy(&f) {
        Ok(rf) => rf,
        Err(e) => {
            c.record("reedy.composite", Err(e));
            return c.out;
        }
    };
    let fj = || json!({ "input": nat_trans_to_json(&f) });
    c.holds("reedy.composite", rf.report.composite, fj);
    c.holds("reedy.left_levelwise_injective", rf.report.g_levelwise_n, fj);
    c.holds("reedy.right_special_surjective", rf.report.h_special_m, fj);

    lift_case(&mut c, &mut rng, &rf.h);
    retract_case(&mut c, &mut rng);
    if let Err(e) = pro_case(&mut c, &mut rng, cfg) {
        c.record("chi.identity", Err(e));
    }
    c.out
}

/// Alters one value of some component so that a square breaks, if possible.
fn break_naturality<R: Rng>(rng: &mut R, f: &NatTrans, comps: &mut [BaseMorphism]) {
    let shape = f.shape();
    let mut order: Vec<usize> = (0..shape.len()).collect();
    order.shuffle(rng);
    for x in order {
        let m = comps[x].clone();
        for i in 0..m.source().len() {
            for v in 0..m.target().len() {
                let mut map = m.assignment().to_vec();
                map[i] = v;
                let trial = BaseMorphism::new_unchecked(m.source().clone(), m.target().clone(), map);
                let saved = std::mem::replace(&mut comps[x], trial);
                if naturality_failure(f.source(), f.target(), comps).is_some() {
                    return;
                }
                comps[x] = saved;
            }
        }
    }
}

/// The first square `t → s` and element where the components fail to be
/// natural.
fn naturality_failure(source: &Diagram, target: &Diagram, comps: &[BaseMorphism]) -> Option<Value> {
    let shape = source.shape();
    for (s, t) in shape.strict_pairs() {
        let down_src = source.arrow(t, s);
        let down_tgt = target.arrow(t, s);
        for c in 0..source.object(t).len() {
            let via_t = down_tgt.apply(comps[t].apply(c));
            let via_s = comps[s].apply(down_src.apply(c));
            if via_t != via_s {
                let name = |o: &BaseObject, i: usize| o.name(i).to_string();
                return Some(json!({
                    "square": [shape.name(s), shape.name(t)],
                    "element": name(source.object(t), c),
                    "down_then_across": name(target.object(s), via_s),
                    "across_then_down": name(target.object(s), via_t),
                }));
            }
        }
    }
    None
}

fn lift_case<R: Rng>(c: &mut Case, rng: &mut R, h: &NatTrans) {
    let p = match gen::random_lifting_problem(rng, h, 2, 1) {
        Ok(p) => p,
        Err(e) => return c.record("lift.cone", Err(e)),
    };
    let lift = lift_against_special(&p);
    match &lift {
        Ok(l) => c.record("lift.cone", l.verify(&p).map(|_| None)),
        Err(e) => c.record("lift.cone", Err(e.clone())),
    }
    let brute = (0..h.shape().len()).try_for_each(|t| {
        match has_lift_bruteforce(p.left(), h.component(t), &p.top()[t], &p.bottom()[t])? {
            Some(_) => Ok(()),
            None => Err(Error::Internal(format!("no lift at `{}`", h.shape().name(t)))),
        }
    });
    c.record("lift.bruteforce", brute.map(|_| None));
}

fn retract_case<R: Rng>(c: &mut Case, rng: &mut R) {
    let b = rng.gen_range(0..=3usize);
    let a = if b == 0 { 0 } else { b + rng.gen_range(0..=1usize) };
    let mut map: Vec<usize> = (0..a).map(|i| if i < b { i } else { rng.gen_range(0..b) }).collect();
    map.shuffle(rng);
    let src = BaseObject::new((0..a).map(|i| format!("a{i}"))).expect("distinct");
    let tgt = BaseObject::new((0..b).map(|i| format!("b{i}"))).expect("distinct");
    let h = BaseMorphism::new(src, tgt, map).expect("in range");
    let r = retract_exhibitor(&h).map(|d| {
        let rep = d.verify();
        (!rep.passed()).then(|| json!({ "map": morphism_to_json(&h, true), "report": rep }))
    });
    c.record("retract.exhibitor", r);
}

fn pro_case<R: Rng>(c: &mut Case, rng: &mut R, cfg: &SuiteConfig) -> Result<()> {
    let width = cfg.max_poset.clamp(1, 2);
    let fiber = cfg.max_fiber.min(2);
    let pc = gen::random_pro_chain(rng, width, 4, 4, 3, fiber)?;
    let objs = &pc.objects;

    // χ on the first two arrows
    let e0 = &objs[0];
    let r0 = reedy(e0)?;
    let id = identity_pm(e0);
    let chi_id = chi_construct(&r0, &r0, &id)?;
    c.holds("chi.identity", chi_id.as_pre_morphism() == identity_pm(&r0.mid), || json!({}));

    let (Some(a0), Some(a1)) = (pc.random_alpha(rng, 0, None), pc.random_alpha(rng, 1, None)) else {
        return Ok(());
    };
    let p = pc.arrow_pm(0, &a0)?;
    let q = pc.arrow_pm(1, &a1)?;
    let fp = functorial_factorization_pro(&objs[0], &objs[1], &p)?;
    let r1 = fp.target.clone();
    let r2 = reedy(&objs[2])?;
    let chi_q = chi_construct(&r1, &r2, &q)?;
    let sq_q = verify_chi(&r1, &r2, &q, &chi_q);
    c.holds("chi.squares", fp.report.passed() && sq_q.passed(), || {
        json!({ "first": fp.report, "second": sq_q })
    });
    let qp = pm_compose::<ArrowMap, NatTrans>(&q, &p)?;
    let chi_qp = chi_construct(&r0, &r2, &qp)?;
    let composite = pm_compose::<BaseMorphism, Diagram>(&chi_q.as_pre_morphism(), &fp.chi.as_pre_morphism())?;
    c.holds("chi.composition", chi_qp.as_pre_morphism() == composite, || json!({}));

    // a larger index map gives a larger pre-morphism
    if let Some(a0b) = pc.random_alpha(rng, 0, Some(&a0)) {
        let pb = pc.arrow_pm(0, &a0b)?;
        let chi_pb = chi_construct(&r0, &r1, &pb)?;
        let ok = pm_leq(e0, &p, &pb) && pm_leq(&r0.mid, &fp.chi.as_pre_morphism(), &chi_pb.as_pre_morphism());
        c.holds("chi.monotone", ok, || json!({ "alpha": a0, "alpha_larger": a0b }));
    }

    pm_algebra(c, rng, &pc)?;

    let raw = pc.random_raw(rng, 2);
    let (fs, gs) = (objs[0].source(), objs[1].source());
    let s = straighten(fs, gs, &raw).and_then(|st| {
        check_pre_morphism(fs, gs, &st)?;
        for (b, (r, m)) in raw.rep.iter().enumerate() {
            if eq_in_colim(fs, st.alpha[b], &st.components[b], *r, m)?.is_none() {
                return Ok(Some(json!({ "not_colim_equal_at": gs.shape().name(b) })));
            }
        }
        Ok(None)
    });
    c.record("straighten.valid", s);
    Ok(())
}

/// Set-level pre-morphisms along the top rows of the chain.
fn set_pm(pc: &gen::ProChain, k: usize, alpha: &[usize]) -> Result<PreMorphism<BaseMorphism>> {
    let p = pc.arrow_pm(k, alpha)?;
    Ok(PreMorphism {
        alpha: p.alpha,
        components: p.components.into_iter().map(|m| m.top).collect(),
    })
}

fn pm_algebra<R: Rng>(c: &mut Case, rng: &mut R, pc: &gen::ProChain) -> Result<()> {
    let d: Vec<&Diagram> = pc.objects.iter().map(|o| o.source()).collect();
    let pick = |rng: &mut R, k: usize, lower: Option<&[usize]>| pc.random_alpha(rng, k, lower);
    let Some(a) = pick(rng, 0, None) else { return Ok(()) };
    let p = set_pm(pc, 0, &a)?;
    c.holds("pm.leq_reflexive", pm_leq(d[0], &p, &p), || json!({}));

    if let Some(a2) = pick(rng, 0, Some(&a)) {
        let p2 = set_pm(pc, 0, &a2)?;
        let anti = !(pm_leq(d[0], &p, &p2) && pm_leq(d[0], &p2, &p)) || p == p2;
        c.holds("pm.leq_antisymmetric", anti, || json!({}));
        if let Some(a3) = pick(rng, 0, Some(&a2)) {
            let p3 = set_pm(pc, 0, &a3)?;
            let trans = !(pm_leq(d[0], &p, &p2) && pm_leq(d[0], &p2, &p3)) || pm_leq(d[0], &p, &p3);
            c.holds("pm.leq_transitive", trans, || json!({}));
        }
        // dominate two pre-morphisms drawn independently
        if let Some(b) = pick(rng, 0, None) {
            let q = set_pm(pc, 0, &b)?;
            let r = match dominate(d[0], d[1], &p, &q) {
                Ok(m) => {
                    let ok = pm_leq(d[0], &p, &m) && pm_leq(d[0], &q, &m) && check_pre_morphism(d[0], d[1], &m).is_ok();
                    Ok((!ok).then(|| json!({ "alpha_p": p.alpha, "alpha_q": q.alpha, "alpha": m.alpha })))
                }
                Err(Error::TruncationExhausted(_)) => Ok((common_bound_exists(d[0], d[1], &p, &q))
                    .then(|| json!({ "truncation_reported_but_bound_exists": true }))),
                Err(e) => Err(e),
            };
            c.record("pm.dominate_bound", r);
        }
    }

    let (Some(b), Some(cc)) = (pick(rng, 1, None), pick(rng, 2, None)) else {
        return Ok(());
    };
    let q = set_pm(pc, 1, &b)?;
    let r = set_pm(pc, 2, &cc)?;
    let left = pm_compose::<_, Diagram>(&r, &pm_compose::<_, Diagram>(&q, &p)?)?;
    let right = pm_compose::<_, Diagram>(&pm_compose::<_, Diagram>(&r, &q)?, &p)?;
    c.holds("pm.compose_associative", left == right, || json!({}));
    let unital = pm_compose::<_, Diagram>(&identity_pm(d[1]), &p)? == p && pm_compose::<_, Diagram>(&p, &identity_pm(d[0]))? == p;
    c.holds("pm.compose_unital", unital, || json!({}));
    if let (Some(a2), Some(b2)) = (pick(rng, 0, Some(&a)), pick(rng, 1, Some(&b))) {
        let (p2, q2) = (set_pm(pc, 0, &a2)?, set_pm(pc, 1, &b2)?);
        let lo = pm_compose::<_, Diagram>(&q, &p)?;
        let hi = pm_compose::<_, Diagram>(&q2, &p2)?;
        c.holds("pm.compose_monotone", pm_leq(d[0], &lo, &hi), || json!({}));
    }
    Ok(())
}

/// Exhaustive search over every index map `B → A` for a common strict
/// upper bound of `p` and `q`.
pub fn common_bound_exists(
    f: &Diagram,
    g: &Diagram,
    p: &PreMorphism<BaseMorphism>,
    q: &PreMorphism<BaseMorphism>,
) -> bool {
    let (a, b) = (f.shape(), g.shape());
    let nb = b.len();
    if a.is_empty() {
        return nb == 0;
    }
    let mut alpha = vec![0usize; nb];
    loop {
        let bounds = (0..nb).all(|y| {
            a.le(p.alpha[y], alpha[y])
                && a.le(q.alpha[y], alpha[y])
                && compose(&p.components[y], f.arrow(alpha[y], p.alpha[y])).ok()
                    == compose(&q.components[y], f.arrow(alpha[y], q.alpha[y])).ok()
        });
        if bounds && b.strict_pairs().all(|(s, t)| a.lt(alpha[s], alpha[t])) {
            return true;
        }
        let mut i = 0;
        loop {
            if i == nb {
                return false;
            }
            alpha[i] += 1;
            if alpha[i] < a.len() {
                break;
            }
            alpha[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> SuiteConfig {
        SuiteConfig {
            seed,
            cases: 40,
            ..SuiteConfig::default()
        }
    }

    #[test]
    fn default_sizes_pass() {
        let r = run_suite(&small(3));
        let failed: Vec<_> = r.failed().collect();
        assert!(r.passed, "{failed:#?}");
        assert!(r.invariants.iter().all(|i| i.verdict == Verdict::Pass), "{:#?}", r.invariants);
    }

    #[test]
    fn same_seed_same_report() {
        let a = serde_json::to_string(&run_suite(&small(9))).unwrap();
        let b = serde_json::to_string(&run_suite(&small(9))).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_sizes_are_vacuous() {
        let r = run_suite(&SuiteConfig {
            max_poset: 0,
            max_fiber: 0,
            ..small(1)
        });
        assert!(r.passed);
        assert!(r.invariants.iter().all(|i| i.verdict == Verdict::Vacuous));
    }

    #[test]
    fn injected_fault_is_caught() {
        let r = run_suite(&SuiteConfig {
            inject: Some(Fault::BrokenNaturality),
            ..small(5)
        });
        assert!(!r.passed);
        let nat = r.invariants.iter().find(|i| i.name == "naturality").unwrap();
        assert_eq!(nat.verdict, Verdict::Fail);
        assert!(nat.counterexample.as_ref().unwrap()["detail"]["square"].is_array());
    }
}
