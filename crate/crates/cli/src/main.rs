use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use profact::base::MapClass;
use profact::category::FinCategory;
use profact::cofinal::{build_tower_with_cap, check_cofinality, tower_directedness_failure, Connectivity};
use profact::diagram::NatTrans;
use profact::factorize::{functorial_factorization_pro, reedy};
use profact::fixtures;
use profact::json::{self as pj, envelope};
use profact::lifting::{has_lift_bruteforce_with_cap, lift_against_special};
use profact::procalc::{check_pre_morphism, dominate_with_cap, eq_in_colim, pm_leq, straighten_with_cap};
use profact::suite::{run_suite, Fault, SuiteConfig};
use profact::Error;

mod render;

#[derive(Parser, Debug)]
#[command(name = "profact", version, about = "Factorizations and lifting in pro-categories of finite sets")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    /// Cap on exhaustive and backtracking searches.
    #[arg(long, env = "PROFACT_SEARCH_CAP", default_value_t = 1_000_000, global = true,
          value_parser = clap::value_parser!(u64).range(1..))]
    search_cap: u64,

    /// Cap on the number of tower elements.
    #[arg(long, env = "PROFACT_ELEMENT_CAP", default_value_t = 10_000, global = true,
          value_parser = clap::value_parser!(u64).range(1..))]
    element_cap: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate an input and report its properties.
    #[command(subcommand)]
    Check(CheckCmd),
    /// Factor a natural transformation as a special surjection after a levelwise injection.
    Reedy { input: PathBuf },
    /// The middle map induced by a pre-morphism of arrows.
    Chi { input: PathBuf },
    /// Lift an injection against a special surjection of diagrams.
    Lift { input: PathBuf },
    /// Build a truncated cofinal tower over a directed category.
    /// INPUT is a category file or `bundled:<name>`.
    Cofinalize {
        input: String,
        #[arg(long, default_value_t = 2)]
        levels: usize,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
        reysha_cap: u64,
    },
    /// A common upper bound of two pre-morphisms.
    Merge { input: PathBuf },
    /// Turn level representatives into a pre-morphism.
    Straighten { input: PathBuf },
    /// Run the randomized property suite.
    Suite {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        cases: usize,
        #[arg(long, default_value_t = 5)]
        max_poset: usize,
        #[arg(long, default_value_t = 4)]
        max_fiber: usize,
        /// Deliberately break the named invariant (`broken-naturality`).
        #[arg(long)]
        inject: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum CheckCmd {
    Poset { input: PathBuf },
    /// INPUT is a category file or `bundled:<name>`.
    Category { input: String },
    Transformation { input: PathBuf },
    Premorphism { input: PathBuf },
}

struct Outcome {
    code: u8,
    doc: Value,
}

impl Outcome {
    fn new(ok: bool, doc: Value) -> Self {
        Outcome {
            code: if ok { 0 } else { 1 },
            doc,
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } => 3,
        e if e.is_resource_limit() => 2,
        _ => 1,
    }
}

fn error_doc(e: &Error) -> Value {
    let err = match e {
        Error::Parse { location, message } => json!({ "location": location, "message": message }),
        e => json!({ "message": e.to_string() }),
    };
    envelope("error", json!({ "passed": false, "error": err }))
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Parse {
        location: path.display().to_string(),
        message: e.to_string(),
    })
}

fn load<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Error> {
    pj::parse(&read(path)?, &path.display().to_string())
}

fn load_category(input: &str) -> Result<FinCategory, Error> {
    if let Some(name) = input.strip_prefix("bundled:") {
        if name == "parallel_pair" {
            return Ok(fixtures::parallel_pair());
        }
        return fixtures::directed()
            .into_iter()
            .find(|(n, _)| *n == name)
            .map(|(_, c)| c)
            .ok_or_else(|| Error::Parse {
                location: input.to_string(),
                message: "no bundled category of that name".into(),
            });
    }
    pj::category_from_json(&load(Path::new(input))?)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 3 } else { 0 });
        }
    };
    let (code, doc) = match run(&cli) {
        Ok(o) => (o.code, o.doc),
        Err(e) => (exit_code(&e), error_doc(&e)),
    };
    match cli.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&doc).expect("values serialize")),
        Format::Text => print!("{}", render::text(&doc)),
    }
    ExitCode::from(code)
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let search_cap = usize::try_from(cli.search_cap).unwrap_or(usize::MAX);
    match &cli.command {
        Command::Check(c) => check(c),
        Command::Reedy { input } => {
            let f = pj::nat_trans_from_json(&load(input)?)?;
            let r = reedy(&f)?;
            let report = r.verify();
            Ok(Outcome::new(
                report.passed(),
                envelope(
                    "reedy",
                    json!({
                        "passed": report.passed(),
                        "report": report,
                        "factorization": {
                            "mid": pj::diagram_to_json(&r.mid),
                            "left": pj::nat_trans_to_json(&r.g),
                            "right": pj::nat_trans_to_json(&r.h),
                        },
                    }),
                ),
            ))
        }
        Command::Chi { input } => {
            let j: ChiInput = load(input)?;
            let f = pj::nat_trans_from_json(&j.source)?;
            let t = pj::nat_trans_from_json(&j.target)?;
            let pm = pj::arrow_pre_morphism_from_json(&f, &t, &j.premorphism)?;
            let pf = functorial_factorization_pro(&f, &t, &pm)?;
            let ok = pf.report.passed();
            Ok(Outcome::new(
                ok,
                envelope(
                    "chi",
                    json!({
                        "passed": ok,
                        "report": pf.report,
                        "chi": pj::pre_morphism_to_json(pf.source.mid.shape_arc(), pf.target.mid.shape_arc(), &pf.chi.as_pre_morphism()),
                        "source_mid": pj::diagram_to_json(&pf.source.mid),
                        "target_mid": pj::diagram_to_json(&pf.target.mid),
                    }),
                ),
            ))
        }
        Command::Lift { input } => lift(input, cli.search_cap),
        Command::Cofinalize {
            input,
            levels,
            reysha_cap,
        } => cofinalize(input, *levels, *reysha_cap as usize, usize::try_from(cli.element_cap).unwrap_or(usize::MAX)),
        Command::Merge { input } => {
            let j: MergeInput = load(input)?;
            let (f, g) = (pj::diagram_from_json(&j.source)?, pj::diagram_from_json(&j.target)?);
            let p = pj::pre_morphism_from_json(&f, &g, &j.p)?;
            let q = pj::pre_morphism_from_json(&f, &g, &j.q)?;
            let m = dominate_with_cap(&f, &g, &p, &q, search_cap)?;
            let ok = pm_leq(&f, &p, &m) && pm_leq(&f, &q, &m);
            Ok(Outcome::new(
                ok,
                envelope(
                    "merge",
                    json!({
                        "passed": ok,
                        "bound": pj::pre_morphism_to_json(f.shape_arc(), g.shape_arc(), &m),
                        "p_below": pm_leq(&f, &p, &m),
                        "q_below": pm_leq(&f, &q, &m),
                    }),
                ),
            ))
        }
        Command::Straighten { input } => {
            let j: StraightenInput = load(input)?;
            let (f, g) = (pj::diagram_from_json(&j.source)?, pj::diagram_from_json(&j.target)?);
            let raw = pj::raw_from_json(&f, &g, &j.raw)?;
            let s = straighten_with_cap(&f, &g, &raw, search_cap)?;
            let mut ok = check_pre_morphism(&f, &g, &s).is_ok();
            for (b, (r, m)) in raw.rep.iter().enumerate() {
                ok &= eq_in_colim(&f, s.alpha[b], &s.components[b], *r, m)?.is_some();
            }
            Ok(Outcome::new(
                ok,
                envelope(
                    "straighten",
                    json!({ "passed": ok, "premorphism": pj::pre_morphism_to_json(f.shape_arc(), g.shape_arc(), &s) }),
                ),
            ))
        }
        Command::Suite {
            seed,
            cases,
            max_poset,
            max_fiber,
            inject,
        } => {
            let inject = inject.as_deref().map(str::parse::<Fault>).transpose()?;
            let report = run_suite(&SuiteConfig {
                seed: *seed,
                cases: *cases,
                max_poset: *max_poset,
                max_fiber: *max_fiber,
                inject,
            });
            let mut doc = serde_json::to_value(&report).expect("report serializes");
            doc["kind"] = json!("suite");
            Ok(Outcome::new(report.passed, doc))
        }
    }
}

#[derive(serde::Deserialize)]
struct ChiInput {
    source: pj::NatTransJson,
    target: pj::NatTransJson,
    premorphism: pj::ArrowPreMorphismJson,
}

#[derive(serde::Deserialize)]
struct MergeInput {
    source: pj::DiagramJson,
    target: pj::DiagramJson,
    p: pj::PreMorphismJson,
    q: pj::PreMorphismJson,
}

#[derive(serde::Deserialize)]
struct PremorphismInput {
    source: pj::DiagramJson,
    target: pj::DiagramJson,
    p: pj::PreMorphismJson,
    #[serde(default)]
    q: Option<pj::PreMorphismJson>,
}

#[derive(serde::Deserialize)]
struct StraightenInput {
    source: pj::DiagramJson,
    target: pj::DiagramJson,
    raw: pj::RawJson,
}

fn check(c: &CheckCmd) -> Result<Outcome, Error> {
    match c {
        CheckCmd::Poset { input } => {
            let p = pj::poset_from_json(&load(input)?)?;
            let by_degree: Vec<Value> = p.by_degree().iter().map(|&x| json!([p.name(x), p.degree(x)])).collect();
            Ok(Outcome::new(
                true,
                envelope(
                    "poset",
                    json!({
                        "passed": true,
                        "elements": p.len(),
                        "directed": p.is_directed(),
                        "max_degree": p.max_degree(),
                        "degrees": by_degree,
                    }),
                ),
            ))
        }
        CheckCmd::Category { input } => {
            let cat = load_category(input)?;
            let v = cat.is_directed();
            let mut doc = json!({ "passed": true, "directed": v.directed, "objects": cat.objects().len() });
            if let Some(w) = &v.witness {
                doc["axiom"] = json!(w.axiom());
                doc["witness"] = serde_json::to_value(w).expect("witness serializes");
            }
            Ok(Outcome::new(true, envelope("category", doc)))
        }
        CheckCmd::Transformation { input } => {
            let t = pj::nat_trans_from_json(&load(input)?)?;
            Ok(Outcome::new(true, envelope("transformation", transformation_report(&t))))
        }
        CheckCmd::Premorphism { input } => {
            let j: PremorphismInput = load(input)?;
            let (f, g) = (pj::diagram_from_json(&j.source)?, pj::diagram_from_json(&j.target)?);
            let p = pj::pre_morphism_from_json(&f, &g, &j.p)?;
            check_pre_morphism(&f, &g, &p)?;
            let mut doc = json!({ "passed": true, "p_valid": true });
            if let Some(q) = &j.q {
                let q = pj::pre_morphism_from_json(&f, &g, q)?;
                check_pre_morphism(&f, &g, &q)?;
                doc["q_valid"] = json!(true);
                doc["p_leq_q"] = json!(pm_leq(&f, &p, &q));
                doc["q_leq_p"] = json!(pm_leq(&f, &q, &p));
                let mut same = true;
                for b in 0..g.shape_arc().len() {
                    same &= eq_in_colim(&f, p.alpha[b], &p.components[b], q.alpha[b], &q.components[b])?.is_some();
                }
                doc["colim_equal"] = json!(same);
            }
            Ok(Outcome::new(true, envelope("premorphism", doc)))
        }
    }
}

fn transformation_report(t: &NatTrans) -> Value {
    let shape = t.shape();
    let fail = |class| t.special_failure(class).map(|x| shape.name(x).to_string());
    json!({
        "passed": true,
        "natural": true,
        "levelwise_injective": t.is_levelwise(MapClass::N),
        "levelwise_surjective": t.is_levelwise(MapClass::M),
        "special_injective": t.is_special(MapClass::N),
        "special_surjective": t.is_special(MapClass::M),
        "special_injective_fails_at": fail(MapClass::N),
        "special_surjective_fails_at": fail(MapClass::M),
    })
}

fn lift(input: &Path, cap: u64) -> Result<Outcome, Error> {
    let p = pj::lifting_problem_from_json(&load(input)?)?;
    let l = lift_against_special(&p)?;
    let verified = l.verify(&p);
    let right = p.right();
    let shape = right.shape();
    let mut confirmed = Vec::with_capacity(shape.len());
    for t in 0..shape.len() {
        let found = has_lift_bruteforce_with_cap(p.left(), right.component(t), &p.top()[t], &p.bottom()[t], cap)?;
        confirmed.push(json!([shape.name(t), found.is_some()]));
    }
    let all_confirmed = confirmed.iter().all(|c| c[1] == json!(true));
    let ok = verified.is_ok() && all_confirmed;
    let comps: serde_json::Map<String, Value> = (0..shape.len())
        .map(|t| (shape.name(t).to_string(), json!(pj::morphism_to_json(&l.components[t], false))))
        .collect();
    let mut doc = json!({
        "passed": ok,
        "cone_verified": verified.is_ok(),
        "bruteforce_confirmed": confirmed,
        "lift": comps,
    });
    if let Err(e) = verified {
        doc["counterexample"] = json!(e.to_string());
    }
    Ok(Outcome::new(ok, envelope("lift", doc)))
}

fn cofinalize(input: &str, levels: usize, reysha_cap: usize, element_cap: usize) -> Result<Outcome, Error> {
    let cat = load_category(input)?;
    let t = build_tower_with_cap(&cat, levels, reysha_cap, element_cap)?;
    let names: Vec<&str> = t.elements().iter().map(|e| e.name.as_str()).collect();
    let elements: Vec<Value> = t
        .elements()
        .iter()
        .map(|e| {
            json!({
                "name": e.name,
                "level": e.level,
                "below": e.below.iter().map(|&r| names[r]).collect::<Vec<_>>(),
                "apex": cat.objects()[e.apex],
                "legs": e.legs.iter().map(|&a| cat.arrows()[a].name.as_str()).collect::<Vec<_>>(),
            })
        })
        .collect();
    let sizes: Vec<usize> = (0..=levels).map(|n| t.level_size(n)).collect();
    let unbounded = tower_directedness_failure(&t, reysha_cap.min(2));
    let reports = check_cofinality(&t);
    let ok = unbounded.is_none() && reports.iter().all(|r| r.nonempty && r.connectivity != Connectivity::Refuted);
    Ok(Outcome::new(
        ok,
        envelope(
            "cofinalize",
            json!({
                "passed": ok,
                "levels": levels,
                "reysha_cap": reysha_cap,
                "level_sizes": sizes,
                "directedness": { "bounded": unbounded.is_none(), "unbounded_reysha": unbounded },
                "over_categories": reports,
                "tower": elements,
            }),
        ),
    ))
}
