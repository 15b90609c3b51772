//! `dgh`: command-line front end for digraph homotopy computations.
//!
//! Exit codes: 0 all checks pass, 1 a property is violated, 2 input error,
//! 3 budget exceeded.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use dgh_core::corpus::named;
use dgh_core::cover::{
    check_cover_equivalence, check_cover_union, nerve_theorem_pipeline, out_closure, CoverError, CoverFile,
    NerveVerdict, SubdigraphFamily,
};
use dgh_core::covering::{check_unique_lifting, is_l_covering, CoveringError, LiftingInstance};
use dgh_core::digraph::{distance_matrix, pi0, Digraph, DigraphError, DigraphFile, DigraphMap, MapFile};
use dgh_core::homology::{
    cubical_homology, induced_homology_map, pi1_presentation, simplicial_homology, HomologyError,
};
use dgh_core::homotopy::{an_tower, homotopy_classes, verify_ddr, verify_oddr, HomotopyError, PairConstraint};
use dgh_core::interval::{enumerate_shrinkings, IntervalError, TowerKind};
use dgh_core::nerve::{check_kan_filling, check_rho_properties, kan_filler_phi, nerve_levels, NerveError};
use dgh_core::verify::{run_named, Suite, SuiteReport, VerifyError};
use dgh_core::{Budgets, Interval, Sign};

#[derive(Parser)]
#[command(name = "dgh", version, about = "Cubical homotopy invariants of finite digraphs")]
struct Cli {
    /// Report format; text is a rendering of the JSON report.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Maximum number of cubes in one truncated nerve.
    #[arg(long, global = true, env = "DGH_CELL_BUDGET")]
    max_cubes: Option<NonZeroUsize>,
    /// Maximum number of maps enumerated by one search.
    #[arg(long, global = true)]
    max_maps: Option<NonZeroUsize>,
    /// Maximum row or column count handed to the Smith kernel.
    #[arg(long, global = true)]
    max_matrix_dim: Option<NonZeroUsize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

/// Digraphs are JSON files or `@name` for a built-in example.
#[derive(Subcommand)]
enum Command {
    /// Vertex and arrow counts, components, distances.
    Info { digraph: String },
    /// Weak components.
    Pi0 { digraph: String },
    /// Homotopy classes of maps between two digraphs.
    Classes {
        source: String,
        target: String,
        /// Comma-separated source labels sent into `--target-part`.
        #[arg(long)]
        source_part: Option<String>,
        #[arg(long)]
        target_part: Option<String>,
        /// Keep homotopies constant on the source part.
        #[arg(long)]
        relative: bool,
    },
    /// Pointed cube classes along a tower of intervals.
    Antower {
        digraph: String,
        #[arg(long)]
        base: String,
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// st, r, l, odd, odd<q> for odd q ≥ 3, or cantor.
        #[arg(long, default_value = "st")]
        tower: TowerKind,
        #[arg(long, default_value_t = 4)]
        stages: usize,
    },
    /// Cube counts of a truncated nerve.
    Nerve {
        digraph: String,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        maxdim: usize,
        #[arg(long, default_value = "+", allow_hyphen_values = true)]
        sign: Sign,
        /// Interval word such as `><>`, overriding `--m` and `--sign`.
        #[arg(long)]
        interval: Option<Interval>,
        /// Include cubes and structure tables.
        #[arg(long)]
        tables: bool,
    },
    /// Homology of a truncated nerve.
    Homology {
        digraph: String,
        #[arg(long, default_value_t = 1)]
        nerve_m: usize,
        #[arg(long, default_value_t = 2)]
        maxdim: usize,
        #[arg(long, default_value = "+", allow_hyphen_values = true)]
        sign: Sign,
        /// Also compute homology of the triangulation and compare.
        #[arg(long)]
        oracle: bool,
    },
    /// Edge-path presentation of the fundamental group of N_m G.
    Pi1 {
        digraph: String,
        #[arg(long)]
        base: String,
        #[arg(long, default_value_t = 1)]
        nerve_m: usize,
        #[arg(long, default_value = "+", allow_hyphen_values = true)]
        sign: Sign,
    },
    /// Maps induced on homology by a digraph map.
    Compare {
        map: PathBuf,
        #[arg(long, default_value_t = 2)]
        maxdim: usize,
        #[arg(long, default_value_t = 1)]
        nerve_m: usize,
    },
    /// Checks one property and exits 1 when it fails.
    #[command(subcommand)]
    Check(CheckCommand),
    /// Compares the homology of N1 G with that of a cover's nerve complex.
    NerveTheorem {
        digraph: String,
        cover: PathBuf,
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
    /// Runs the built-in property suites.
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Subcommand)]
enum CheckCommand {
    /// All shrinkings J → J′ lie in one class relative to the endpoints.
    Shrinkings { source: Interval, target: Interval },
    /// Directed deformation retract of the digraph onto `--part`.
    Ddr {
        digraph: String,
        #[arg(long)]
        part: String,
        /// `a=b,c=d`; unlisted vertices stay fixed.
        #[arg(long, default_value = "")]
        eta: String,
    },
    /// Deformation retract of the out-closure of an in-closed part onto it.
    Oddr {
        digraph: String,
        #[arg(long)]
        part: String,
        /// Self-map of the out-closure, `a=b,...`; unlisted vertices stay fixed.
        #[arg(long, default_value = "")]
        eta: String,
    },
    /// N1 of the digraph is the union of the members' nerves.
    Cover {
        digraph: String,
        cover: PathBuf,
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
    /// A map carrying one cover to another induces isomorphisms face by face.
    CoverEquiv {
        map: PathBuf,
        source_cover: PathBuf,
        target_cover: PathBuf,
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
    /// The map is an l-covering; all equivalent conditions are evaluated.
    Covering {
        map: PathBuf,
        #[arg(long, default_value_t = 2)]
        l: usize,
    },
    /// Unique lifting of a 2-covering against a horn, `--horn n,i,eps,m`.
    Lifting {
        map: PathBuf,
        #[arg(long)]
        horn: String,
    },
    /// Every horn map into the digraph fills through Phi.
    Kan {
        digraph: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        m: usize,
    },
    /// Face identities of the collapse maps rho-bar.
    Rho {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        m: usize,
    },
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Runs property suites; `all` runs every suite.
    Paper {
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Budget(_) => 3,
        }
    }
}

macro_rules! classify {
    ($($t:ty => $budget:expr),* $(,)?) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                let is_budget: fn(&$t) -> bool = $budget;
                if is_budget(&e) {
                    CliError::Budget(e.to_string())
                } else {
                    CliError::Input(e.to_string())
                }
            }
        }
    )*};
}

classify! {
    DigraphError => |e| matches!(e, DigraphError::BudgetExceeded(_)),
    IntervalError => |_| false,
    HomotopyError => HomotopyError::is_budget,
    NerveError => NerveError::is_budget,
    HomologyError => |e| matches!(e, HomologyError::BudgetExceeded(_)),
    CoverError => CoverError::is_budget,
    CoveringError => CoveringError::is_budget,
    VerifyError => VerifyError::is_budget,
}

/// A report plus whether every check in it passed.
struct Outcome {
    property: Option<String>,
    report: Value,
    passed: bool,
}

impl Outcome {
    fn info(report: Value) -> Self {
        Outcome { property: None, report, passed: true }
    }

    fn check(property: &str, report: Value, passed: bool) -> Self {
        Outcome { property: Some(property.to_string()), report, passed }
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_digraph(arg: &str) -> Result<Digraph, CliError> {
    load_relative(arg, Path::new(""))
}

/// `@name` is a built-in example; other paths are relative to `base`.
fn load_relative(arg: &str, base: &Path) -> Result<Digraph, CliError> {
    if let Some(name) = arg.strip_prefix('@') {
        return named(name).ok_or_else(|| CliError::Input(format!("no built-in example `{name}`")));
    }
    let file: DigraphFile = parse_json(&base.join(arg))?;
    Ok(Digraph::from_file(&file)?)
}

fn load_map(path: &Path) -> Result<DigraphMap, CliError> {
    let file: MapFile = parse_json(path)?;
    let base = path.parent().unwrap_or(Path::new(""));
    let source = Arc::new(load_relative(&file.source, base)?);
    let target = Arc::new(load_relative(&file.target, base)?);
    Ok(DigraphMap::from_labels(source, target, &file.assignment)?)
}

fn load_cover(g: Arc<Digraph>, path: &Path) -> Result<SubdigraphFamily, CliError> {
    let file: CoverFile = parse_json(path)?;
    Ok(SubdigraphFamily::from_file(g, &file)?)
}

fn labels(list: &str) -> Vec<&str> {
    list.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
}

fn part_of(g: &Digraph, list: &str) -> Result<Vec<usize>, CliError> {
    Ok(g.vertex_set(&labels(list))?)
}

/// Self-map from `a=b,...`, fixing unlisted vertices.
fn self_map(g: Arc<Digraph>, spec: &str) -> Result<DigraphMap, CliError> {
    let mut table: BTreeMap<String, String> = g.labels().iter().map(|l| (l.clone(), l.clone())).collect();
    for entry in labels(spec) {
        let (from, to) = entry
            .split_once('=')
            .ok_or_else(|| CliError::Input(format!("expected `vertex=image`, got `{entry}`")))?;
        g.vertex(from.trim())?;
        table.insert(from.trim().to_string(), to.trim().to_string());
    }
    Ok(DigraphMap::from_labels(g.clone(), g, &table)?)
}

fn parse_horn(s: &str) -> Result<LiftingInstance, CliError> {
    let bad = || CliError::Input(format!("expected --horn n,i,eps,m, got `{s}`"));
    let v: Vec<usize> = s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?;
    let [n, i, eps, m] = v[..] else { return Err(bad()) };
    if n == 0 || i == 0 || i > n || eps > 1 {
        return Err(bad());
    }
    Ok(LiftingInstance::Horn { m, n, i, eps: eps as u8 })
}

fn nerve_interval(m: usize, sign: Sign, interval: Option<Interval>) -> Interval {
    interval.unwrap_or_else(|| Interval::standard(m, sign))
}

fn run(command: Command, budgets: &Budgets) -> Result<Outcome, CliError> {
    match command {
        Command::Info { digraph } => {
            let g = load_digraph(&digraph)?;
            let arrows: Vec<(&str, &str)> = g.arrows().map(|(u, v)| (g.label(u), g.label(v))).collect();
            Ok(Outcome::info(json!({
                "vertices": g.labels(),
                "arrows": arrows,
                "vertex_count": g.len(),
                "arrow_count": g.arrow_count(),
                "components": pi0(&g).len(),
                "distances": to_value(&distance_matrix(&g)),
            })))
        }
        Command::Pi0 { digraph } => {
            let g = load_digraph(&digraph)?;
            let comps: Vec<Vec<String>> = pi0(&g).iter().map(|c| g.labels_of(c)).collect();
            Ok(Outcome::info(json!({ "count": comps.len(), "components": comps })))
        }
        Command::Classes { source, target, source_part, target_part, relative } => {
            let (s, t) = (load_digraph(&source)?, load_digraph(&target)?);
            let sp = part_of(&s, source_part.as_deref().unwrap_or(""))?;
            let tp = match target_part {
                Some(list) => part_of(&t, &list)?,
                None => (0..t.len()).collect(),
            };
            let constraint = (!sp.is_empty()).then_some(PairConstraint { source_part: &sp, target_part: &tp, relative });
            let classes = homotopy_classes(&s, &t, constraint, budgets.max_maps)?;
            let reps: Vec<BTreeMap<&str, &str>> = classes
                .representatives()
                .iter()
                .map(|&i| classes.maps[i].iter().enumerate().map(|(x, &w)| (s.label(x), t.label(w))).collect())
                .collect();
            Ok(Outcome::info(json!({
                "maps": classes.maps.len(),
                "classes": classes.class_count,
                "representatives": reps,
            })))
        }
        Command::Antower { digraph, base, n, tower, stages } => {
            let g = load_digraph(&digraph)?;
            let b = g.vertex(&base)?;
            let t = an_tower(&g, b, n, tower, stages, budgets.max_maps)?;
            let ok = t.transitions.iter().all(|x| x.well_defined);
            Ok(Outcome::check("precomposition respects homotopy classes", to_value(&t), ok))
        }
        Command::Nerve { digraph, m, maxdim, sign, interval, tables } => {
            let g = Arc::new(load_digraph(&digraph)?);
            let j = nerve_interval(m, sign, interval);
            let x = nerve_levels(g.clone(), &j, maxdim, budgets.max_cubes)?;
            let mut report = json!({ "interval": j.to_string(), "levels": to_value(&x.counts()) });
            if tables {
                let cubes: Vec<Vec<Vec<&str>>> = x
                    .cubes
                    .iter()
                    .map(|level| level.iter().map(|c| c.iter().map(|&v| g.label(v)).collect()).collect())
                    .collect();
                report["cubes"] = to_value(&cubes);
                report["faces"] = to_value(&x.faces);
                report["degeneracies"] = to_value(&x.degeneracies);
                report["connections"] = to_value(&x.connections);
            }
            Ok(Outcome::info(report))
        }
        Command::Homology { digraph, nerve_m, maxdim, sign, oracle } => {
            let g = Arc::new(load_digraph(&digraph)?);
            let x = nerve_levels(g, &Interval::standard(nerve_m, sign), maxdim, budgets.max_cubes)?;
            let h = cubical_homology(&x, budgets.max_matrix_dim)?;
            let mut report = to_value(&h);
            if h.truncated_top {
                report["not_final"] = json!([maxdim]);
            }
            let mut passed = true;
            if oracle {
                let s = simplicial_homology(&x, budgets.max_matrix_dim)?;
                passed = s.reliable() == h.reliable();
                report["simplicial"] = to_value(&s);
                report["oracle_agrees"] = json!(passed);
            }
            Ok(Outcome { property: oracle.then(|| "cubical and simplicial homology agree".into()), report, passed })
        }
        Command::Pi1 { digraph, base, nerve_m, sign } => {
            let g = Arc::new(load_digraph(&digraph)?);
            let b = g.vertex(&base)?;
            let x = nerve_levels(g, &Interval::standard(nerve_m, sign), 2, budgets.max_cubes)?;
            let p = pi1_presentation(&x, b)?;
            let s = p.simplify(64);
            let words = |q: &dgh_core::homology::GroupPresentation| -> Vec<String> {
                q.relators.iter().map(|r| q.word_to_string(r)).collect()
            };
            Ok(Outcome::info(json!({
                "generators": p.generators.len(),
                "relators": p.relators.len(),
                "simplified": { "generators": s.generators, "relators": words(&s) },
                "abelianization": to_value(&s.abelianization()?),
            })))
        }
        Command::Compare { map, maxdim, nerve_m } => {
            let phi = load_map(&map)?;
            let j = Interval::standard(nerve_m, Sign::Plus);
            let x = nerve_levels(phi.source().clone(), &j, maxdim, budgets.max_cubes)?;
            let y = nerve_levels(phi.target().clone(), &j, maxdim, budgets.max_cubes)?;
            let f = dgh_core::nerve::nerve_functor_map(&phi, &x, &y)?;
            let degrees = (0..maxdim)
                .map(|d| induced_homology_map(&f, &x, &y, d).map(|m| to_value(&m)))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Outcome::info(json!({ "degrees": degrees, "not_final": [maxdim] })))
        }
        Command::Check(c) => run_check(c, budgets),
        Command::NerveTheorem { digraph, cover, k } => {
            let g = Arc::new(load_digraph(&digraph)?);
            let f = load_cover(g, &cover)?;
            match nerve_theorem_pipeline(&f, k, budgets) {
                Ok(r) => {
                    let ok = r.verdict != NerveVerdict::Inconsistent;
                    Ok(Outcome::check("contractible intersections give the homology of the nerve", to_value(&r), ok))
                }
                Err(e) => cover_violation(e),
            }
        }
        Command::Verify(VerifyCommand::Paper { suite }) => {
            let reports = run_suites(&suite, budgets)?;
            let passed = reports.iter().all(|r| r.passed);
            Ok(Outcome::check("property suites", to_value(&reports), passed))
        }
    }
}

/// Runs the requested suites on separate threads; results keep suite order.
fn run_suites(name: &str, budgets: &Budgets) -> Result<Vec<SuiteReport>, CliError> {
    if name != "all" {
        return Ok(run_named(name, budgets)?);
    }
    let results: Vec<Result<SuiteReport, VerifyError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = Suite::ALL
            .into_iter()
            .map(|s| scope.spawn(move || dgh_core::verify::run_suite(s, budgets)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("suite thread panicked")).collect()
    });
    Ok(results.into_iter().collect::<Result<_, _>>()?)
}

/// Covers that fail to cover, or mix closedness, are violations rather
/// than input errors.
fn cover_violation(e: CoverError) -> Result<Outcome, CliError> {
    match e {
        CoverError::NotACover(missing) => Ok(Outcome::check(
            "members cover every vertex",
            json!({ "error": "not a cover", "uncovered": missing }),
            false,
        )),
        CoverError::MixedClosedness { .. } => Ok(Outcome::check(
            "members are all in-closed or all out-closed",
            json!({ "error": e.to_string() }),
            false,
        )),
        other => Err(other.into()),
    }
}

fn run_check(command: CheckCommand, budgets: &Budgets) -> Result<Outcome, CliError> {
    match command {
        CheckCommand::Shrinkings { source, target } => {
            let found = enumerate_shrinkings(&source, &target);
            let (sb, tb) = (source.boundary(), target.boundary());
            let c = PairConstraint { source_part: &sb, target_part: &tb, relative: true };
            let classes = homotopy_classes(&source.to_digraph(), &target.to_digraph(), Some(c), budgets.max_maps)?;
            let mut ids: Vec<usize> = found.iter().filter_map(|s| classes.class_of_map(&s.assignment)).collect();
            ids.sort_unstable();
            ids.dedup();
            let shrinkings: Vec<&Vec<usize>> = found.iter().map(|s| &s.assignment).collect();
            let report = json!({
                "source": source.to_string(),
                "target": target.to_string(),
                "shrinkings": shrinkings,
                "relative_classes_hit": ids.len(),
            });
            Ok(Outcome::check("shrinkings are homotopic relative to the endpoints", report, ids.len() <= 1))
        }
        CheckCommand::Ddr { digraph, part, eta } => {
            let g = Arc::new(load_digraph(&digraph)?);
            let p = part_of(&g, &part)?;
            let e = self_map(g.clone(), &eta)?;
            match verify_ddr(&g, &p, &e) {
                Ok(r) => {
                    let ok = r.definition_holds && r.agree;
                    Ok(Outcome::check("directed deformation retract", to_value(&r), ok))
                }
                Err(HomotopyError::NotInClosed(labels)) => Ok(Outcome::check(
                    "the retracted part is in-closed",
                    json!({ "error": "part is not in-closed", "part": labels }),
                    false,
                )),
                Err(e) => Err(e.into()),
            }
        }
        CheckCommand::Oddr { digraph, part, eta } => {
            let g = load_digraph(&digraph)?;
            let p = part_of(&g, &part)?;
            let out = Arc::new(g.induced(&out_closure(&g, &p))?);
            let e = self_map(out, &eta)?;
            match verify_oddr(&g, &p, &e) {
                Ok(r) => {
                    let ok = r.ddr.definition_holds && r.ddr.agree;
                    Ok(Outcome::check("deformation retract of the out-closure", to_value(&r), ok))
                }
                Err(HomotopyError::NotInClosed(labels)) => Ok(Outcome::check(
                    "the retracted part is in-closed",
                    json!({ "error": "part is not in-closed", "part": labels }),
                    false,
                )),
                Err(e) => Err(e.into()),
            }
        }
        CheckCommand::Cover { digraph, cover, k } => {
            let g = Arc::new(load_digraph(&digraph)?);
            let f = load_cover(g, &cover)?;
            let statuses = to_value(&f.statuses());
            match check_cover_union(&f, k, budgets) {
                Ok(r) => {
                    let mut report = to_value(&r);
                    report["members"] = statuses;
                    Ok(Outcome::check("N1 of a closed cover is the union of the members' nerves", report, r.passed))
                }
                Err(e) => cover_violation(e),
            }
        }
        CheckCommand::CoverEquiv { map, source_cover, target_cover, k } => {
            let phi = load_map(&map)?;
            let f = load_cover(phi.source().clone(), &source_cover)?;
            let fp = load_cover(phi.target().clone(), &target_cover)?;
            match check_cover_equivalence(&phi, &f, &fp, k, budgets) {
                Ok(r) => Ok(Outcome::check("face-wise isomorphisms give a global isomorphism", to_value(&r), r.passed)),
                Err(e) => cover_violation(e),
            }
        }
        CheckCommand::Covering { map, l } => {
            let p = load_map(&map)?;
            let r = is_l_covering(&p, l)?;
            Ok(Outcome::check("l-covering, with all equivalent conditions agreeing", to_value(&r), r.holds && r.agree))
        }
        CheckCommand::Lifting { map, horn } => {
            let p = load_map(&map)?;
            let instance = parse_horn(&horn)?;
            match check_unique_lifting(&p, &instance, budgets.max_maps) {
                Ok(r) => Ok(Outcome::check("unique lifting against the horn", to_value(&r), r.passed)),
                Err(CoveringError::NotTwoCovering(w)) => Ok(Outcome::check(
                    "the map is a 2-covering",
                    json!({ "error": "not a 2-covering", "witness": w }),
                    false,
                )),
                Err(e) => Err(e.into()),
            }
        }
        CheckCommand::Kan { digraph, n, m } => {
            let g = load_digraph(&digraph)?;
            if n == 0 || m == 0 {
                return Err(CliError::Input("--n and --m must be positive".into()));
            }
            let mut fillers = Vec::new();
            for i in 1..=n {
                for eps in 0..2u8 {
                    let phi = kan_filler_phi(m, n, i, eps)?;
                    fillers.push(json!({
                        "i": i,
                        "eps": eps,
                        "is_digraph_map": phi.is_digraph_map,
                        "image_in_horn": phi.image_in_horn,
                        "restricts_to_clamp": phi.restricts_to_clamp,
                    }));
                }
            }
            let fillers_ok = fillers.iter().all(|f| {
                ["is_digraph_map", "image_in_horn", "restricts_to_clamp"].iter().all(|k| f[k] == json!(true))
            });
            let r = check_kan_filling(&g, n, m, budgets.max_maps)?;
            let ok = fillers_ok && r.holds();
            let report = json!({ "fillers": fillers, "filling": to_value(&r) });
            Ok(Outcome::check("horns fill through Phi", report, ok))
        }
        CheckCommand::Rho { n, m } => {
            let r = check_rho_properties(n, m)?;
            Ok(Outcome::check("face identities of rho-bar", to_value(&r), r.passed))
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Info { .. } => "info",
        Command::Pi0 { .. } => "pi0",
        Command::Classes { .. } => "classes",
        Command::Antower { .. } => "antower",
        Command::Nerve { .. } => "nerve",
        Command::Homology { .. } => "homology",
        Command::Pi1 { .. } => "pi1",
        Command::Compare { .. } => "compare",
        Command::Check(c) => match c {
            CheckCommand::Shrinkings { .. } => "check shrinkings",
            CheckCommand::Ddr { .. } => "check ddr",
            CheckCommand::Oddr { .. } => "check oddr",
            CheckCommand::Cover { .. } => "check cover",
            CheckCommand::CoverEquiv { .. } => "check cover-equiv",
            CheckCommand::Covering { .. } => "check covering",
            CheckCommand::Lifting { .. } => "check lifting",
            CheckCommand::Kan { .. } => "check kan",
            CheckCommand::Rho { .. } => "check rho",
        },
        Command::NerveTheorem { .. } => "nerve-theorem",
        Command::Verify(_) => "verify paper",
    }
}

fn render_text(v: &Value) -> String {
    let mut out = String::new();
    render_into(v, 0, &mut out);
    out
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("null".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(items) if items.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let parts: Vec<String> = items.iter().filter_map(scalar).collect();
            Some(format!("[{}]", parts.join(", ")))
        }
        Value::Array(items) if items.is_empty() => Some("[]".into()),
        _ => None,
    }
}

fn render_into(v: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                match scalar(x) {
                    Some(s) => {
                        let _ = writeln!(out, "{pad}{k}: {s}");
                    }
                    None => {
                        let _ = writeln!(out, "{pad}{k}:");
                        render_into(x, depth + 1, out);
                    }
                }
            }
        }
        Value::Array(items) => {
            for x in items {
                match scalar(x) {
                    Some(s) => {
                        let _ = writeln!(out, "{pad}- {s}");
                    }
                    None => {
                        let _ = writeln!(out, "{pad}-");
                        render_into(x, depth + 1, out);
                    }
                }
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{}", scalar(other).unwrap_or_default());
        }
    }
}

fn emit(v: &Value, format: Format) {
    let text = match format {
        Format::Json => serde_json::to_string_pretty(v).expect("values serialize") + "\n",
        Format::Text => render_text(v),
    };
    // a closed pipe downstream is not an error worth reporting
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let defaults = Budgets::default();
    let budgets = Budgets {
        max_maps: cli.max_maps.map_or(defaults.max_maps, NonZeroUsize::get),
        max_cubes: cli.max_cubes.map_or(defaults.max_cubes, NonZeroUsize::get),
        max_matrix_dim: cli.max_matrix_dim.map_or(defaults.max_matrix_dim, NonZeroUsize::get),
    };
    let name = command_name(&cli.command);
    match run(cli.command, &budgets) {
        Ok(outcome) => {
            let mut envelope = json!({ "command": name, "passed": outcome.passed, "report": outcome.report });
            if let Some(p) = outcome.property {
                envelope["property"] = json!(p);
            }
            emit(&envelope, cli.format);
            ExitCode::from(if outcome.passed { 0 } else { 1 })
        }
        Err(e) => {
            let kind = if matches!(e, CliError::Budget(_)) { "budget" } else { "input" };
            emit(&json!({ "command": name, "error": kind, "message": e.to_string() }), cli.format);
            eprintln!("dgh: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horn_argument() {
        assert!(matches!(parse_horn("2,1,0,4"), Ok(LiftingInstance::Horn { m: 4, n: 2, i: 1, eps: 0 })));
        assert!(parse_horn("2,3,0,4").is_err());
        assert!(parse_horn("2,1,0").is_err());
    }

    #[test]
    fn text_rendering_nests() {
        let v = json!({ "a": 1, "b": { "c": [1, 2] }, "d": [{ "e": true }] });
        assert_eq!(render_text(&v), "a: 1\nb:\n  c: [1, 2]\nd:\n  -\n    e: true\n");
    }

    #[test]
    fn self_map_fixes_unlisted() {
        let g = Arc::new(dgh_core::corpus::standard_interval(1));
        let m = self_map(g, "1=0").unwrap();
        assert_eq!(m.assignment(), &[0, 0]);
    }
}
