//! Batch dispatch: JSON config in, JSON report out.
//!
//! Every run reads one config document (`"schema": "bft/1"`), executes the
//! named command, and emits a report that echoes the config alongside the
//! results. Rationals travel as `"p/q"` strings in both directions, and
//! identical configs produce byte-identical reports.

use bft_core::flags::{
    flag_adapted_basis, norm_greedy_basis, subadditive_closure, verify_adapted_basis,
    verify_greedy_bounds, Flag, NormOracle,
};
use bft_core::gf2::{AtomId, BitVec, GroupWord};
use bft_core::graev::{
    coset_signature, graev_dist, graev_norm, graev_norm_bruteforce, in_linear_subgroup, in_u_d,
    in_u_gamma, nonarch_majorant, DisjointCover, GammaVerdict, LetterNorm, PseudometricSpace,
    SpaceSpec,
};
use bft_core::mathias::{
    closure_probe, in_basic_open, in_laver_nbhd, laver_to_mathias, laver_tree_check, mathias_leq,
    verify_ud_witness, witness_in_ud, LaverNbhd, LaverTreeApprox, LetterNormRule,
    MathiasCondition, RefinementVerdict,
};
use bft_core::omega::{
    diagonal_intersection, greedy_function, pseudointersection_check, selective_witness,
    PseudoOutcome, RepFilter, RepSet, SelectiveOutcome, SelectorMode, SetFamily,
};
use bft_core::rational::parse_frac;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};
use std::collections::{BTreeMap, BTreeSet};

/// Exit codes: distinct classes of non-success, stable across runs.
pub mod exit_code {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const VALIDATION: i32 = 2;
    pub const EXHAUSTED: i32 = 3;
    pub const COUNTEREXAMPLE: i32 = 4;
}

#[derive(Debug)]
pub struct Outcome {
    pub report: Value,
    pub code: i32,
}

#[derive(Debug)]
pub struct CliError {
    pub message: String,
    pub code: i32,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self { message: message.into(), code: exit_code::USAGE }
    }

    fn validation(message: impl Into<String>) -> Self {
        Self { message: message.into(), code: exit_code::VALIDATION }
    }

    fn exhausted(message: impl Into<String>) -> Self {
        Self { message: message.into(), code: exit_code::EXHAUSTED }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

// ---------------------------------------------------------------------------
// config schema
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
struct Config {
    schema: String,
    #[serde(flatten)]
    command: CommandSpec,
    #[serde(default)]
    bounds: Bounds,
    #[serde(default)]
    seed: u64,
}

#[derive(Deserialize, Clone, Default)]
struct Bounds {
    #[serde(default)]
    search: Option<u64>,
    #[serde(default)]
    depth: Option<u64>,
    #[serde(default)]
    max_element: Option<u64>,
    #[serde(default)]
    max_length: Option<usize>,
}

impl Bounds {
    fn search(&self) -> u64 {
        self.search.unwrap_or(1 << 20)
    }

    fn depth(&self) -> u64 {
        self.depth.unwrap_or(6)
    }
}

#[derive(Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
enum CommandSpec {
    Norm { space: SpaceSpec, word: Vec<String> },
    Dist { space: SpaceSpec, word: Vec<String>, other: Vec<String> },
    Majorize { space: SpaceSpec },
    Nbhd { base: NbhdBase, word: Vec<String> },
    LinearSubgroup { cover: Vec<Vec<AtomId>>, word: Vec<AtomId> },
    FilterCheck { filter: FilterSpec, set: String },
    Diag { family: FamilySpec, count: usize },
    Selective { filter: FilterSpec, family: FamilySpec, mode: SelectorMode },
    Pseudo { filter: FilterSpec, family: FamilySpec },
    Mathias(MathiasOp),
    Laver(LaverOp),
    LaverRefine { nbhd: LaverSpec, filter: FilterSpec },
    ProbeClosure { family: FamilySpec, filter: FilterSpec },
    Witness { family: FamilySpec, rule: RuleSpec, n: u64 },
    FlagBasis { dim: usize, chain: Vec<Vec<String>>, input: Vec<String> },
    GreedyBasis { dim: usize, norm: NormSpec, input: Vec<String> },
    VerifyBounds { dim: usize, norm: NormSpec, input: Vec<String>, lengths: Option<Vec<usize>> },
}

#[derive(Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
enum NbhdBase {
    SeminormBall { space: SpaceSpec },
    LetterNorm { values: BTreeMap<String, String> },
    CoverSum { covers: Vec<Vec<Vec<AtomId>>>, #[serde(default)] cancel_depth: usize },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum FilterSpec {
    Name(String),
    Full {
        #[serde(default)]
        generators: Vec<String>,
        #[serde(default)]
        schema: Option<FamilySpec>,
    },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum FamilySpec {
    Shorthand(String),
    Object(SetFamily),
}

#[derive(Deserialize)]
#[serde(rename_all = "kebab-case", tag = "op")]
enum MathiasOp {
    Leq { stronger: ConditionSpec, weaker: ConditionSpec },
    BasicOpen { word: Vec<AtomId>, stem: Vec<AtomId>, side: String },
}

#[derive(Deserialize)]
struct ConditionSpec {
    stem: Vec<AtomId>,
    side: String,
}

#[derive(Deserialize)]
#[serde(rename_all = "kebab-case", tag = "op")]
enum LaverOp {
    Member { nbhd: LaverSpec, word: Vec<AtomId> },
    TreeCheck { tree: TreeSpec, filter: FilterSpec },
}

#[derive(Deserialize)]
struct LaverSpec {
    #[serde(default)]
    table: Vec<(Vec<AtomId>, String)>,
    #[serde(default)]
    rule: Option<FamilySpec>,
}

#[derive(Deserialize)]
struct TreeSpec {
    nodes: Vec<Vec<AtomId>>,
    stem: Vec<AtomId>,
    #[serde(default)]
    succ: Vec<(Vec<AtomId>, String)>,
}

#[derive(Deserialize)]
#[serde(rename_all = "kebab-case")]
enum RuleSpec {
    Reciprocal { scale: String },
    Constant { value: String },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NormSpec {
    Table { values: Vec<String> },
    Random { random: bool },
}

// ---------------------------------------------------------------------------
// conversions
// ---------------------------------------------------------------------------

fn build_filter(spec: &FilterSpec) -> Result<RepFilter, CliError> {
    match spec {
        FilterSpec::Name(name) if name == "frechet" => Ok(RepFilter::frechet()),
        FilterSpec::Name(name) => Err(CliError::usage(format!("unknown filter name {name:?}"))),
        FilterSpec::Full { generators, schema } => {
            let sets = generators
                .iter()
                .map(|g| RepSet::parse(g))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CliError::validation(e.to_string()))?;
            let mut filter = RepFilter::from_generators(sets)
                .map_err(|e| CliError::validation(e.to_string()))?;
            if let Some(schema) = schema {
                filter = filter.with_schema(build_family(schema)?);
            }
            Ok(filter)
        }
    }
}

fn build_family(spec: &FamilySpec) -> Result<SetFamily, CliError> {
    match spec {
        FamilySpec::Shorthand(s) => {
            SetFamily::parse(s).map_err(|e| CliError::usage(e.to_string()))
        }
        FamilySpec::Object(f) => Ok(f.clone()),
    }
}

fn build_space(spec: &SpaceSpec) -> Result<PseudometricSpace, CliError> {
    let space = spec.build().map_err(|e| CliError::validation(e.to_string()))?;
    space.validate().map_err(|e| CliError::validation(e.to_string()))?;
    Ok(space)
}

fn build_laver(spec: &LaverSpec) -> Result<LaverNbhd, CliError> {
    let mut nbhd = match &spec.rule {
        Some(rule) => LaverNbhd::from_rule(build_family(rule)?),
        None => LaverNbhd::empty(),
    };
    for (stem, side) in &spec.table {
        let side = RepSet::parse(side).map_err(|e| CliError::validation(e.to_string()))?;
        nbhd = nbhd
            .with_entry(GroupWord::from_atoms(stem.iter().copied()), side)
            .map_err(|e| CliError::validation(e.to_string()))?;
    }
    Ok(nbhd)
}

fn build_rule(spec: &RuleSpec) -> Result<LetterNormRule, CliError> {
    let parse = |s: &str| parse_frac(s).map_err(CliError::usage);
    Ok(match spec {
        RuleSpec::Reciprocal { scale } => LetterNormRule::Reciprocal { scale: parse(scale)? },
        RuleSpec::Constant { value } => LetterNormRule::Constant { value: parse(value)? },
    })
}

fn build_vectors(dim: usize, strings: &[String]) -> Result<Vec<BitVec>, CliError> {
    strings
        .iter()
        .map(|s| {
            let v = BitVec::parse_binary(s).map_err(CliError::usage)?;
            if v.len() != dim {
                return Err(CliError::usage(format!(
                    "vector {s:?} has dimension {}, expected {dim}",
                    v.len()
                )));
            }
            Ok(v)
        })
        .collect()
}

fn build_norm(dim: usize, spec: &NormSpec, seed: u64) -> Result<NormOracle, CliError> {
    let values = match spec {
        NormSpec::Table { values } => values
            .iter()
            .map(|s| parse_frac(s).map_err(CliError::usage))
            .collect::<Result<Vec<_>, _>>()?,
        NormSpec::Random { random } => {
            if !random {
                return Err(CliError::usage("norm.random must be true when present"));
            }
            random_norm_values(dim, seed)
        }
    };
    let values = subadditive_closure(dim, values)
        .map_err(|e| CliError::validation(e.to_string()))?;
    NormOracle::new(dim, values).map_err(|e| CliError::validation(e.to_string()))
}

/// Seeded positive seed table; the subadditive closure turns it into a
/// genuine norm.
pub fn random_norm_values(dim: usize, seed: u64) -> Vec<bft_core::rational::Rat> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = vec![bft_core::rational::Rat::default()];
    for _ in 1..(1usize << dim) {
        let numer = rng.gen_range(1..=64i64);
        let denom = rng.gen_range(1..=16i64);
        values.push(bft_core::rational::rat(numer, denom));
    }
    values
}

fn word_from_names(space: &PseudometricSpace, names: &[String]) -> Result<GroupWord, CliError> {
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    space
        .word_from_names(&refs)
        .map_err(|e| CliError::validation(e.to_string()))
}

fn frac(q: &bft_core::rational::Rat) -> String {
    bft_core::rational::to_frac_string(q)
}

// ---------------------------------------------------------------------------
// dispatch
// ---------------------------------------------------------------------------

/// Runs a config document and produces the report plus the exit code.
pub fn run_config(config_text: &str) -> Result<Outcome, CliError> {
    let raw: Value = serde_json::from_str(config_text)
        .map_err(|e| CliError::usage(format!("config is not valid JSON: {e}")))?;
    let config: Config = serde_json::from_value(raw.clone())
        .map_err(|e| CliError::usage(format!("config does not match the schema: {e}")))?;
    if config.schema != "bft/1" {
        return Err(CliError::usage(format!(
            "unsupported schema {:?}; expected \"bft/1\"",
            config.schema
        )));
    }
    let (operation, result, code) = dispatch(&config)?;
    let report = json!({
        "schema": "bft/1",
        "operation": operation,
        "config": raw,
        "result": result,
        "status": status_of(code),
    });
    Ok(Outcome { report, code })
}

fn status_of(code: i32) -> &'static str {
    match code {
        exit_code::OK => "ok",
        exit_code::EXHAUSTED => "search-exhausted",
        exit_code::COUNTEREXAMPLE => "counterexample",
        exit_code::VALIDATION => "validation-failed",
        _ => "error",
    }
}

type DispatchResult = Result<(Value, Value, i32), CliError>;

fn dispatch(config: &Config) -> DispatchResult {
    let bounds = &config.bounds;
    match &config.command {
        CommandSpec::Norm { space, word } => {
            let space = build_space(space)?;
            let g = word_from_names(&space, word)?;
            let norm = graev_norm(&space, &g)
                .map_err(|e| CliError::validation(e.to_string()))?;
            let mut result = json!({ "norm": frac(&norm) });
            if g.len() <= 8 {
                let oracle = graev_norm_bruteforce(&space, &g)
                    .map_err(|e| CliError::validation(e.to_string()))?;
                result["oracle"] = json!({
                    "norm": frac(&oracle.value),
                    "matchings_enumerated": oracle.matchings_enumerated,
                    "agrees": oracle.value == norm,
                });
            }
            Ok((
                op("graev-norm", "invariant seminorm by minimum-weight letter matching"),
                result,
                exit_code::OK,
            ))
        }
        CommandSpec::Dist { space, word, other } => {
            let space = build_space(space)?;
            let g = word_from_names(&space, word)?;
            let h = word_from_names(&space, other)?;
            let d = graev_dist(&space, &g, &h)
                .map_err(|e| CliError::validation(e.to_string()))?;
            Ok((
                op("graev-dist", "invariant pseudometric between words"),
                json!({ "dist": frac(&d) }),
                exit_code::OK,
            ))
        }
        CommandSpec::Majorize { space } => {
            let space = build_space(space)?;
            let rho = nonarch_majorant(&space)
                .map_err(|e| CliError::validation(e.to_string()))?;
            Ok((
                op("nonarch-majorant", "dyadic ultrametric majorant by threshold clustering"),
                serde_json::to_value(rho.to_spec()).expect("spec serializes"),
                exit_code::OK,
            ))
        }
        CommandSpec::Nbhd { base, word } => run_nbhd(base, word),
        CommandSpec::LinearSubgroup { cover, word } => {
            let cover = DisjointCover::new(cover.clone())
                .map_err(|e| CliError::validation(e.to_string()))?;
            let g = GroupWord::from_atoms(word.iter().copied());
            let member = in_linear_subgroup(&g, &cover)
                .map_err(|e| CliError::validation(e.to_string()))?;
            let signature = coset_signature(&g, &cover)
                .map_err(|e| CliError::validation(e.to_string()))?;
            Ok((
                op("linear-subgroup", "per-block parity membership in the cover subgroup"),
                json!({ "member": member, "signature": signature.to_string() }),
                exit_code::OK,
            ))
        }
        CommandSpec::FilterCheck { filter, set } => {
            let f = build_filter(filter)?;
            let a = RepSet::parse(set).map_err(|e| CliError::validation(e.to_string()))?;
            let verdict = f
                .contains(&a, bounds.depth())
                .map_err(|e| CliError::validation(e.to_string()))?;
            Ok((
                op("filter-check", "membership against the canonical generator chain"),
                serde_json::to_value(&verdict).expect("verdict serializes"),
                exit_code::OK,
            ))
        }
        CommandSpec::Diag { family, count } => {
            let family = build_family(family)?;
            let d = diagonal_intersection(&family, *count, bounds.search())
                .map_err(|e| CliError::exhausted(e.to_string()))?;
            let f = greedy_function(&family, *count, bounds.search())
                .map_err(|e| CliError::exhausted(e.to_string()))?;
            Ok((
                op("diagonal-intersection", "greedy diagonal of an indexed family"),
                json!({ "d": d, "greedy_function": f }),
                exit_code::OK,
            ))
        }
        CommandSpec::Selective { filter, family, mode } => {
            let f = build_filter(filter)?;
            let fam = build_family(family)?;
            let outcome = selective_witness(&f, &fam, *mode, bounds.depth().max(16))
                .map_err(|e| CliError::validation(e.to_string()))?;
            let code = match &outcome {
                SelectiveOutcome::NotFound { .. } => exit_code::EXHAUSTED,
                _ => exit_code::OK,
            };
            Ok((
                op("selective-witness", "selector or transversal search over canonical candidates"),
                serde_json::to_value(&outcome).expect("outcome serializes"),
                code,
            ))
        }
        CommandSpec::Pseudo { filter, family } => {
            let f = build_filter(filter)?;
            let fam = build_family(family)?;
            let outcome = pseudointersection_check(&f, &fam, bounds.depth())
                .map_err(|e| CliError::validation(e.to_string()))?;
            let code = match &outcome {
                PseudoOutcome::Unknown { .. } => exit_code::EXHAUSTED,
                _ => exit_code::OK,
            };
            Ok((
                op("pseudointersection", "almost-contained witness over the canonical chain"),
                serde_json::to_value(&outcome).expect("outcome serializes"),
                code,
            ))
        }
        CommandSpec::Mathias(op_spec) => run_mathias(op_spec),
        CommandSpec::Laver(op_spec) => run_laver(op_spec, bounds),
        CommandSpec::LaverRefine { nbhd, filter } => {
            let u = build_laver(nbhd)?;
            let f = build_filter(filter)?;
            let report = laver_to_mathias(
                &u,
                &f,
                bounds.max_element.unwrap_or(32),
                bounds.max_length.unwrap_or(6),
                bounds.depth(),
            )
            .map_err(|e| CliError::validation(e.to_string()))?;
            let code = match &report.verification {
                RefinementVerdict::Verified { .. } => exit_code::OK,
                RefinementVerdict::Counterexample { .. } => exit_code::COUNTEREXAMPLE,
            };
            Ok((
                op("laver-refine", "single-side refinement of a Laver neighborhood"),
                serde_json::to_value(&report).expect("report serializes"),
                code,
            ))
        }
        CommandSpec::ProbeClosure { family, filter } => {
            let fam = build_family(family)?;
            let f = build_filter(filter)?;
            let report = closure_probe(
                &fam,
                &f,
                bounds.max_element.unwrap_or(16),
                bounds.max_length.unwrap_or(4),
                bounds.depth(),
            )
            .map_err(|e| CliError::validation(e.to_string()))?;
            let code = if report.zero_limit.is_some() {
                exit_code::OK
            } else {
                exit_code::EXHAUSTED
            };
            Ok((
                op("closure-probe", "bounded classification against a cone union"),
                serde_json::to_value(&report).expect("report serializes"),
                code,
            ))
        }
        CommandSpec::Witness { family, rule, n } => {
            let fam = build_family(family)?;
            let rule = build_rule(rule)?;
            let witness = witness_in_ud(&fam, &rule, *n, bounds.search())
                .map_err(|e| CliError::exhausted(e.to_string()))?;
            verify_ud_witness(&fam, &rule, *n, &witness)
                .map_err(|e| CliError::validation(e.to_string()))?;
            Ok((
                op("unit-ball-witness", "greedy cloud word inside the unit seminorm ball"),
                serde_json::to_value(&witness).expect("witness serializes"),
                exit_code::OK,
            ))
        }
        CommandSpec::FlagBasis { dim, chain, input } => {
            let chain = chain
                .iter()
                .map(|level| build_vectors(*dim, level))
                .collect::<Result<Vec<_>, _>>()?;
            let flag = Flag::new(*dim, chain).map_err(|e| CliError::validation(e.to_string()))?;
            let input = build_vectors(*dim, input)?;
            let adapted = flag_adapted_basis(&flag, &input)
                .map_err(|e| CliError::validation(e.to_string()))?;
            verify_adapted_basis(&flag, &input, &adapted)
                .map_err(|e| CliError::validation(e.to_string()))?;
            Ok((
                op("flag-basis", "sifted basis adapted to a subspace chain"),
                serde_json::to_value(&adapted).expect("basis serializes"),
                exit_code::OK,
            ))
        }
        CommandSpec::GreedyBasis { dim, norm, input } => {
            let oracle = build_norm(*dim, norm, config.seed)?;
            let input = build_vectors(*dim, input)?;
            let basis = norm_greedy_basis(&oracle, &input)
                .map_err(|e| CliError::validation(e.to_string()))?;
            Ok((
                op("greedy-basis", "norm-minimizing basis replacement"),
                json!({ "basis": basis.iter().map(|v| v.to_string()).collect::<Vec<_>>() }),
                exit_code::OK,
            ))
        }
        CommandSpec::VerifyBounds { dim, norm, input, lengths } => {
            let oracle = build_norm(*dim, norm, config.seed)?;
            let input = build_vectors(*dim, input)?;
            let basis = norm_greedy_basis(&oracle, &input)
                .map_err(|e| CliError::validation(e.to_string()))?;
            let lengths: Vec<usize> = match lengths {
                Some(ls) => ls.clone(),
                None => (0..=input.len()).collect(),
            };
            let mut reports = Vec::new();
            for n in lengths {
                match verify_greedy_bounds(&basis, &oracle, n) {
                    Ok(report) => reports.push(json!({
                        "length": n,
                        "report": serde_json::to_value(&report).expect("report serializes"),
                    })),
                    Err(e) => {
                        return Ok((
                            op("verify-bounds", "letter, separation, and closedness bounds"),
                            json!({ "violation": e.to_string(), "length": n }),
                            exit_code::COUNTEREXAMPLE,
                        ))
                    }
                }
            }
            Ok((
                op("verify-bounds", "letter, separation, and closedness bounds"),
                json!({
                    "basis": basis.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                    "lengths": reports,
                }),
                exit_code::OK,
            ))
        }
    }
}

fn run_nbhd(base: &NbhdBase, word: &[String]) -> DispatchResult {
    match base {
        NbhdBase::SeminormBall { space } => {
            let space = build_space(space)?;
            let g = word_from_names(&space, word)?;
            let norm = graev_norm(&space, &g)
                .map_err(|e| CliError::validation(e.to_string()))?;
            let member = in_u_d(&space, &g).map_err(|e| CliError::validation(e.to_string()))?;
            Ok((
                op("unit-ball", "membership in the open unit seminorm ball"),
                json!({ "member": member, "norm": frac(&norm) }),
                exit_code::OK,
            ))
        }
        NbhdBase::LetterNorm { values } => {
            let parsed = values
                .iter()
                .map(|(atom, q)| {
                    let atom: AtomId = atom
                        .parse()
                        .map_err(|e| CliError::usage(format!("bad atom key {atom:?}: {e}")))?;
                    Ok((atom, parse_frac(q).map_err(CliError::usage)?))
                })
                .collect::<Result<BTreeMap<_, _>, CliError>>()?;
            let norm = LetterNorm::new(parsed).map_err(|e| CliError::validation(e.to_string()))?;
            let atoms = word
                .iter()
                .map(|s| s.parse::<AtomId>().map_err(|e| CliError::usage(e.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            let g = GroupWord::from_atoms(atoms);
            let total = norm
                .sum_over(&g)
                .map_err(|e| CliError::validation(e.to_string()))?;
            let member = norm.in_u_d(&g).map_err(|e| CliError::validation(e.to_string()))?;
            Ok((
                op("unit-ball", "letter-norm sum against the unit bound"),
                json!({ "member": member, "total": frac(&total) }),
                exit_code::OK,
            ))
        }
        NbhdBase::CoverSum { covers, cancel_depth } => {
            let covers = covers
                .iter()
                .map(|blocks| DisjointCover::new(blocks.clone()))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CliError::validation(e.to_string()))?;
            let ground: BTreeSet<AtomId> = covers
                .iter()
                .flat_map(|c| c.blocks().iter().flatten().copied())
                .collect();
            let ground: Vec<AtomId> = ground.into_iter().collect();
            let atoms = word
                .iter()
                .map(|s| s.parse::<AtomId>().map_err(|e| CliError::usage(e.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            let g = GroupWord::from_atoms(atoms);
            let verdict = in_u_gamma(&g, &covers, *cancel_depth, &ground)
                .map_err(|e| CliError::validation(e.to_string()))?;
            let result = match &verdict {
                GammaVerdict::Member { pairs, cancellations } => json!({
                    "member": true,
                    "pairs": pairs,
                    "cancellations": cancellations,
                }),
                GammaVerdict::NotFound { covers_available, cancel_depth, needs_more_covers } => {
                    json!({
                        "member": false,
                        "covers_available": covers_available,
                        "cancel_depth": cancel_depth,
                        "undecided_at_prefix": needs_more_covers,
                    })
                }
            };
            Ok((
                op("cover-sum", "pair assignment into cover blocks with bounded cancellation"),
                result,
                exit_code::OK,
            ))
        }
    }
}

fn run_mathias(op_spec: &MathiasOp) -> DispatchResult {
    match op_spec {
        MathiasOp::Leq { stronger, weaker } => {
            let build = |c: &ConditionSpec| -> Result<MathiasCondition, CliError> {
                let side = RepSet::parse(&c.side).map_err(|e| CliError::validation(e.to_string()))?;
                MathiasCondition::new(GroupWord::from_atoms(c.stem.iter().copied()), side)
                    .map_err(|e| CliError::validation(e.to_string()))
            };
            let s = build(stronger)?;
            let w = build(weaker)?;
            let leq = mathias_leq(&s, &w).map_err(|e| CliError::validation(e.to_string()))?;
            Ok((
                op("mathias-order", "extension order on stem/side conditions"),
                json!({ "leq": leq }),
                exit_code::OK,
            ))
        }
        MathiasOp::BasicOpen { word, stem, side } => {
            let side = RepSet::parse(side).map_err(|e| CliError::validation(e.to_string()))?;
            let t = GroupWord::from_atoms(word.iter().copied());
            let s = GroupWord::from_atoms(stem.iter().copied());
            Ok((
                op("basic-open", "membership in a stem/side basic set"),
                json!({ "member": in_basic_open(&t, &s, &side) }),
                exit_code::OK,
            ))
        }
    }
}

fn run_laver(op_spec: &LaverOp, bounds: &Bounds) -> DispatchResult {
    match op_spec {
        LaverOp::Member { nbhd, word } => {
            let u = build_laver(nbhd)?;
            let t = GroupWord::from_atoms(word.iter().copied());
            match in_laver_nbhd(&t, &u) {
                Ok(member) => Ok((
                    op("laver-member", "prefix-recursive neighborhood membership"),
                    json!({ "member": member }),
                    exit_code::OK,
                )),
                Err(e) => Err(CliError::exhausted(e.to_string())),
            }
        }
        LaverOp::TreeCheck { tree, filter } => {
            let f = build_filter(filter)?;
            let nodes = tree
                .nodes
                .iter()
                .map(|n| GroupWord::from_atoms(n.iter().copied()))
                .collect();
            let succ = tree
                .succ
                .iter()
                .map(|(node, side)| {
                    Ok((
                        GroupWord::from_atoms(node.iter().copied()),
                        RepSet::parse(side).map_err(|e| CliError::validation(e.to_string()))?,
                    ))
                })
                .collect::<Result<BTreeMap<_, _>, CliError>>()?;
            let approx = LaverTreeApprox {
                nodes,
                stem: GroupWord::from_atoms(tree.stem.iter().copied()),
                succ,
            };
            match laver_tree_check(&approx, &f, bounds.depth()) {
                Ok(()) => Ok((
                    op("laver-tree", "stem, prefix-closure, and successor certification"),
                    json!({ "ok": true }),
                    exit_code::OK,
                )),
                Err(e) => Ok((
                    op("laver-tree", "stem, prefix-closure, and successor certification"),
                    json!({ "ok": false, "violation": e.to_string() }),
                    exit_code::VALIDATION,
                )),
            }
        }
    }
}

fn op(name: &str, summary: &str) -> Value {
    json!({ "name": name, "summary": summary })
}

/// Renders a report deterministically: sorted keys, two-space indent, one
/// trailing newline.
pub fn render_report(report: &Value) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    text
}
