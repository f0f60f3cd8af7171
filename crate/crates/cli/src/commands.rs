//! Implementations of the six subcommands.
//!
//! Every command resolves its channel source, evaluates, assembles a JSON
//! report through [`crate::output`], and returns a process exit code:
//! `0` success, `1` a semantic check failed (the report still prints),
//! `2` input error, `3` solver failure — the latter two via error
//! classification in `main`.

use std::fs;
use std::path::PathBuf;

use serde_json::{Map, Value};

use mapnorm::channels::{self as ch, LinearMapRep};
use mapnorm::linalg::{hs_inner, operator_norm, partial_trace, Subsystem};
use mapnorm::measures::{
    approx_inverse_bounds, base_norm_cptni, best_cptp_payoff, bounds_lower, bounds_trace_norm,
    bounds_upper, build_simulation, compile_measure_programs, diamond_norm, game_advantage,
    game_from_witness, payoff, robustness_r, robustness_r_double_prime, robustness_r_prime, spa,
    spa_prime, verify_simulation, BoundKind, BoundsReport, MeasureOptions,
};
use mapnorm::nonmarkov::{builtin_family, i_dia_window, ChannelFamily};
use mapnorm::par::{map_collect, Parallelism};
use mapnorm::sdp::{Block, ConeProgram};
use mapnorm::{Error, Result};

use crate::output::{
    self, channel_value, float_value, matrix_value, measure_result_value, operator_value, render,
    SCHEMA,
};

/// Tolerance for the classification gates (TP / CP detection).
const CLASS_TOL: f64 = 1e-8;
/// Tolerance for the identity and equality checks.
const CHECK_TOL: f64 = 1e-6;
/// Normalized duality-gap ceiling.
const GAP_CEILING: f64 = 1e-7;
/// Tolerance for the game payoff reconstruction.
const PAYOFF_TOL: f64 = 1e-5;
/// Ceiling for the simulation replay residual.
const RESIDUAL_TOL: f64 = 1e-8;

/// Resolved global flags shared by all commands.
pub struct Ctx {
    /// Channel source (`--channel`), if given.
    pub channel: Option<String>,
    /// Report destination; stdout when absent.
    pub out: Option<PathBuf>,
    /// Solver options with tolerance overrides and parallelism applied.
    pub opts: MeasureOptions,
    /// Seed for randomized verification probes.
    pub seed: u64,
    /// Solve certified SDPs where the command would otherwise report
    /// closed forms only.
    pub certify: bool,
    /// Dump compiled cone programs here.
    pub dump_sdp: Option<PathBuf>,
}

impl Ctx {
    fn require_channel(&self) -> Result<(LinearMapRep, &str)> {
        let source = self.channel.as_deref().ok_or_else(|| {
            Error::Validation(
                "a channel source is required: --channel <path|builtin:name?k=v>".into(),
            )
        })?;
        Ok((load_map(source)?, source))
    }

    fn options_value(&self) -> Value {
        let mut map = Map::new();
        map.insert("gap_tol".into(), float_value(self.opts.gap_tol));
        map.insert("feas_tol".into(), float_value(self.opts.feas_tol));
        map.insert("seed".into(), Value::from(self.seed));
        Value::Object(map)
    }

    fn envelope(&self, command: &str, source: &str, map: &LinearMapRep) -> Map<String, Value> {
        let mut obj = Map::new();
        obj.insert("schema".into(), Value::from(SCHEMA));
        obj.insert("command".into(), Value::String(command.into()));
        obj.insert("channel".into(), channel_value(source, map, CLASS_TOL));
        obj.insert("options".into(), self.options_value());
        obj
    }

    fn emit(&self, value: &Value) -> Result<()> {
        let text = render(value);
        match &self.out {
            Some(path) => fs::write(path, text).map_err(|e| {
                Error::Validation(format!("cannot write report to '{}': {e}", path.display()))
            }),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    /// Write the compiled primal/dual pair for each named measure, when
    /// `--dump-sdp` was requested.
    fn dump_programs(&self, map: &LinearMapRep, source: &str, names: &[&str]) -> Result<()> {
        let Some(path) = &self.dump_sdp else {
            return Ok(());
        };
        if names.is_empty() {
            return Err(Error::Validation(
                "--dump-sdp: this invocation solves no measure cone programs".into(),
            ));
        }
        let mut programs = Map::new();
        for name in names {
            let (primal, dual) = compile_measure_programs(map, name)?;
            let mut pair = Map::new();
            pair.insert("primal".into(), cone_program_value(&primal));
            pair.insert("dual".into(), cone_program_value(&dual));
            programs.insert((*name).to_owned(), Value::Object(pair));
        }
        let mut obj = Map::new();
        obj.insert("schema".into(), Value::from(SCHEMA));
        obj.insert("channel".into(), Value::String(source.into()));
        obj.insert("programs".into(), Value::Object(programs));
        fs::write(path, render(&Value::Object(obj))).map_err(|e| {
            Error::Validation(format!(
                "cannot write programs to '{}': {e}",
                path.display()
            ))
        })
    }
}

/// Load a map from a file path or a `builtin:` mini-spec.
pub fn load_map(source: &str) -> Result<LinearMapRep> {
    if let Some(spec) = source.strip_prefix("builtin:") {
        ch::builtin_from_spec(spec)
    } else {
        let text = fs::read_to_string(source)
            .map_err(|e| Error::Parse(format!("cannot read channel file '{source}': {e}")))?;
        ch::channel_from_json(&text)
    }
}

/// Map `--jobs` onto an execution strategy; `N ≥ 2` sizes the global rayon
/// pool (best effort — the pool may already exist).
pub fn configure_jobs(jobs: Option<usize>) -> Result<Parallelism> {
    match jobs {
        None => Ok(Parallelism::Rayon),
        Some(0) => Err(Error::Validation("--jobs must be at least 1".into())),
        Some(1) => Ok(Parallelism::Sequential),
        Some(n) => {
            #[cfg(feature = "parallel")]
            {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            #[cfg(not(feature = "parallel"))]
            let _ = n;
            Ok(Parallelism::Rayon)
        }
    }
}

// ---------------------------------------------------------------------------
// measure registry

const CANONICAL_MEASURES: &[&str] = &[
    "R",
    "Rdoubleprime",
    "Rprime",
    "base_norm_cptni",
    "diamond_norm",
    "game_advantage",
    "spa",
    "spa_prime",
];

const MEASURE_ALIASES: &[(&str, &str)] = &[
    ("diamond", "diamond_norm"),
    ("dia", "diamond_norm"),
    ("base_norm", "base_norm_cptni"),
    ("base", "base_norm_cptni"),
    ("cptni", "base_norm_cptni"),
    ("R'", "Rprime"),
    ("R''", "Rdoubleprime"),
    ("advantage", "game_advantage"),
    ("spa'", "spa_prime"),
];

fn canonical_measure(name: &str) -> Result<&'static str> {
    if let Some(found) = CANONICAL_MEASURES.iter().find(|m| **m == name) {
        return Ok(found);
    }
    if let Some((_, canon)) = MEASURE_ALIASES.iter().find(|(alias, _)| *alias == name) {
        return Ok(canon);
    }
    Err(Error::Validation(format!(
        "unknown measure '{name}'; known measures: {}",
        CANONICAL_MEASURES.join(", ")
    )))
}

fn closed_form_value(name: &str, value: f64) -> Value {
    let mut map = Map::new();
    map.insert("measure".into(), Value::String(name.into()));
    map.insert("value".into(), float_value(value));
    map.insert("closed_form".into(), Value::Bool(true));
    Value::Object(map)
}

fn evaluate_measure(map: &LinearMapRep, name: &str, opts: &MeasureOptions) -> Result<Value> {
    let res = match name {
        "diamond_norm" => diamond_norm(map, opts)?,
        "base_norm_cptni" => base_norm_cptni(map, opts)?,
        "R" => robustness_r(map, opts)?,
        "Rprime" => robustness_r_prime(map, opts)?,
        "Rdoubleprime" => robustness_r_double_prime(map, opts)?,
        "game_advantage" => game_advantage(map, opts)?,
        "spa" => return Ok(closed_form_value("spa", spa(map))),
        "spa_prime" => return Ok(closed_form_value("spa_prime", spa_prime(map)?)),
        other => {
            return Err(Error::Validation(format!(
                "measure '{other}' has no evaluator"
            )))
        }
    };
    Ok(measure_result_value(&res))
}

fn has_programs(name: &str) -> bool {
    !matches!(name, "spa" | "spa_prime")
}

// ---------------------------------------------------------------------------
// compute

pub fn cmd_compute(ctx: &Ctx, requested: &[String]) -> Result<i32> {
    let (map, source) = ctx.require_channel()?;
    let mut names: Vec<&'static str> = requested
        .iter()
        .map(|n| canonical_measure(n))
        .collect::<Result<_>>()?;
    names.sort_unstable();
    names.dedup();

    let evaluated = map_collect(&names, ctx.opts.parallelism, |name| {
        evaluate_measure(&map, name, &ctx.opts)
    });
    let mut results = Vec::with_capacity(evaluated.len());
    for item in evaluated {
        results.push(item?);
    }

    let sdp_names: Vec<&str> = names.iter().copied().filter(|n| has_programs(n)).collect();
    ctx.dump_programs(&map, source, &sdp_names)?;

    let mut obj = ctx.envelope("compute", source, &map);
    obj.insert("results".into(), Value::Array(results));
    ctx.emit(&Value::Object(obj))?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// bounds

fn bounds_value(report: &BoundsReport) -> Value {
    let rows: Vec<Value> = report
        .bounds
        .iter()
        .map(|b| {
            let mut row = Map::new();
            row.insert("measure".into(), Value::String(b.measure.clone()));
            row.insert("name".into(), Value::String(b.name.clone()));
            row.insert(
                "kind".into(),
                Value::String(
                    match b.kind {
                        BoundKind::Lower => "lower",
                        BoundKind::Upper => "upper",
                    }
                    .into(),
                ),
            );
            row.insert("value".into(), float_value(b.value));
            Value::Object(row)
        })
        .collect();
    Value::Array(rows)
}

fn best_bounds_value(report: &BoundsReport) -> Value {
    let mut measures: Vec<&str> = report.measures();
    measures.sort_unstable();
    let mut obj = Map::new();
    for measure in measures {
        let mut entry = Map::new();
        if let Some(lo) = report.lower(measure) {
            entry.insert("lower".into(), float_value(lo));
        }
        if let Some(hi) = report.upper(measure) {
            entry.insert("upper".into(), float_value(hi));
        }
        obj.insert(measure.to_owned(), Value::Object(entry));
    }
    Value::Object(obj)
}

pub fn cmd_bounds(ctx: &Ctx, approx_inverse: Option<&str>, epsilon: f64) -> Result<i32> {
    let (map, source) = ctx.require_channel()?;

    let mut report = bounds_trace_norm(&map)?;
    report.merge(bounds_upper(&map)?);
    report.merge(bounds_lower(&map, &[])?);
    if let Some(fwd_source) = approx_inverse {
        let forward = load_map(fwd_source)?;
        report.merge(approx_inverse_bounds(&forward, &map, epsilon, &[])?);
    }
    report.check_consistency()?;

    let mut obj = ctx.envelope("bounds", source, &map);
    obj.insert("bounds".into(), bounds_value(&report));
    obj.insert("best".into(), best_bounds_value(&report));
    obj.insert("consistent".into(), Value::Bool(true));
    if let Some(fwd_source) = approx_inverse {
        let mut ai = Map::new();
        ai.insert("forward".into(), Value::String(fwd_source.into()));
        ai.insert("epsilon".into(), float_value(epsilon));
        obj.insert("approx_inverse".into(), Value::Object(ai));
    }

    let certified_names: &[&str] = &[
        "R",
        "Rdoubleprime",
        "Rprime",
        "base_norm_cptni",
        "diamond_norm",
    ];
    if ctx.certify {
        let evaluated = map_collect(certified_names, ctx.opts.parallelism, |name| {
            evaluate_measure(&map, name, &ctx.opts)
        });
        let mut certified = Map::new();
        for (name, item) in certified_names.iter().zip(evaluated) {
            let value = item?;
            let v = value["value"].as_f64().expect("measure value is a float");
            report.check_value(name, v)?;
            certified.insert((*name).to_owned(), float_value(v));
        }
        obj.insert("certified".into(), Value::Object(certified));
        ctx.dump_programs(&map, source, certified_names)?;
    } else {
        ctx.dump_programs(&map, source, &[])?;
    }

    ctx.emit(&Value::Object(obj))?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// simulate

pub fn cmd_simulate(ctx: &Ctx, probes: usize) -> Result<i32> {
    let (map, source) = ctx.require_channel()?;
    let r = robustness_r(&map, &ctx.opts)?;
    let plan = build_simulation(&map, &ctx.opts)?;
    let cost = plan.cost();
    let residual = verify_simulation(&plan, &map, probes, ctx.seed)?;

    let cost_ok = (cost - (2.0 * r.value + 1.0)).abs() <= CHECK_TOL;
    let replay_ok = residual <= RESIDUAL_TOL;

    let mut lambda = Map::new();
    lambda.insert("d_in".into(), Value::from(plan.lambda.d_in() as u64));
    lambda.insert("d_out".into(), Value::from(plan.lambda.d_out() as u64));
    lambda.insert("choi".into(), matrix_value(plan.lambda.choi().matrix()));
    lambda.insert(
        "classification".into(),
        output::classification_value(&plan.lambda.classify(CLASS_TOL)),
    );

    let mut plan_obj = Map::new();
    plan_obj.insert("lambda".into(), Value::Object(lambda));
    plan_obj.insert("x".into(), operator_value(&plan.x));
    plan_obj.insert("mu_plus".into(), float_value(plan.mu_plus));
    plan_obj.insert("mu_minus".into(), float_value(plan.mu_minus));
    plan_obj.insert("omega_plus".into(), operator_value(&plan.omega_plus));
    plan_obj.insert("omega_minus".into(), operator_value(&plan.omega_minus));

    let mut verification = Map::new();
    verification.insert("probes".into(), Value::from(probes as u64));
    verification.insert("seed".into(), Value::from(ctx.seed));
    verification.insert("max_residual".into(), float_value(residual));
    verification.insert("tolerance".into(), float_value(RESIDUAL_TOL));
    verification.insert("passed".into(), Value::Bool(replay_ok));

    let mut obj = ctx.envelope("simulate", source, &map);
    obj.insert("plan".into(), Value::Object(plan_obj));
    obj.insert("cost".into(), float_value(cost));
    obj.insert("robustness".into(), float_value(r.value));
    obj.insert("cost_matches_2r_plus_1".into(), Value::Bool(cost_ok));
    obj.insert("verification".into(), Value::Object(verification));
    ctx.dump_programs(&map, source, &["R"])?;
    ctx.emit(&Value::Object(obj))?;
    Ok(if cost_ok && replay_ok { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// game

pub fn cmd_game(ctx: &Ctx) -> Result<i32> {
    let (map, source) = ctx.require_channel()?;
    let adv = game_advantage(&map, &ctx.opts)?;
    let w = adv
        .dual_witness
        .operator("W")
        .ok_or_else(|| Error::Solver("game_advantage returned no dual witness W".into()))?;
    let game = game_from_witness(w, map.d_in(), map.d_out())?;
    let score = payoff(&map, &game)?;
    let pairing = hs_inner(w, map.choi())?;
    let best = best_cptp_payoff(&game, &ctx.opts)?;

    // P(Φ, G_W) must reproduce ⟨W, J_Φ⟩ exactly, and the payoff against
    // the map must exceed the best channel payoff by the advantage factor.
    let construction_ok = (score - pairing).abs() <= PAYOFF_TOL * 1.0_f64.max(pairing.abs());
    let ratio_ok = (score - adv.value * best.value).abs() <= PAYOFF_TOL * 1.0_f64.max(score.abs());

    let ensemble: Vec<Value> = game
        .ensemble
        .iter()
        .map(|(p, state)| {
            let mut entry = Map::new();
            entry.insert("probability".into(), float_value(*p));
            entry.insert("state".into(), operator_value(state));
            Value::Object(entry)
        })
        .collect();
    let povm: Vec<Value> = game.povm.iter().map(operator_value).collect();
    let weights: Vec<Value> = game
        .weights
        .iter()
        .map(|row| Value::Array(row.iter().map(|v| float_value(*v)).collect()))
        .collect();
    let mut game_obj = Map::new();
    game_obj.insert("ensemble".into(), Value::Array(ensemble));
    game_obj.insert("povm".into(), Value::Array(povm));
    game_obj.insert("weights".into(), Value::Array(weights));

    let mut advantage = Map::new();
    advantage.insert("value".into(), float_value(adv.value));
    advantage.insert("gap".into(), float_value(adv.gap));

    let mut best_obj = Map::new();
    best_obj.insert("value".into(), float_value(best.value));
    best_obj.insert("gap".into(), float_value(best.gap));

    let mut checks = Map::new();
    checks.insert(
        "payoff_reproduces_witness_pairing".into(),
        Value::Bool(construction_ok),
    );
    checks.insert(
        "payoff_is_advantage_times_best".into(),
        Value::Bool(ratio_ok),
    );

    let mut obj = ctx.envelope("game", source, &map);
    obj.insert("advantage".into(), Value::Object(advantage));
    obj.insert("game".into(), Value::Object(game_obj));
    obj.insert("payoff".into(), float_value(score));
    obj.insert("witness_pairing".into(), float_value(pairing));
    obj.insert("best_cptp_payoff".into(), Value::Object(best_obj));
    obj.insert("checks".into(), Value::Object(checks));
    ctx.dump_programs(&map, source, &["Rprime"])?;
    ctx.emit(&Value::Object(obj))?;
    Ok(if construction_ok && ratio_ok { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// verify

struct CheckRow {
    name: &'static str,
    status: &'static str,
    detail: String,
}

impl CheckRow {
    fn test(name: &'static str, ok: bool, detail: String) -> Self {
        CheckRow {
            name,
            status: if ok { "pass" } else { "fail" },
            detail,
        }
    }

    fn skipped(name: &'static str, why: &str) -> Self {
        CheckRow {
            name,
            status: "skipped",
            detail: why.to_owned(),
        }
    }
}

fn eq_detail(got: f64, want: f64) -> String {
    format!(
        "got {}, want {} (tol {})",
        output::format_f64(got),
        output::format_f64(want),
        output::format_f64(CHECK_TOL)
    )
}

fn ge_detail(left: f64, right: f64) -> String {
    format!(
        "{} vs {} (slack {})",
        output::format_f64(left),
        output::format_f64(right),
        output::format_f64(CHECK_TOL)
    )
}

pub fn cmd_verify(ctx: &Ctx) -> Result<i32> {
    let (map, source) = ctx.require_channel()?;
    let class = map.classify(CLASS_TOL);

    let dia = diamond_norm(&map, &ctx.opts)?;
    let cptni = base_norm_cptni(&map, &ctx.opts)?;
    let r = robustness_r(&map, &ctx.opts)?;
    let rp = robustness_r_prime(&map, &ctx.opts)?;
    let rpp = robustness_r_double_prime(&map, &ctx.opts)?;
    let results = [&dia, &cptni, &r, &rp, &rpp];

    let mut checks: Vec<CheckRow> = Vec::new();

    for res in results {
        let rel = res.gap / 1.0_f64.max(res.value.abs());
        let name: &'static str = match res.measure.as_str() {
            "diamond_norm" => "duality_gap:diamond_norm",
            "base_norm_cptni" => "duality_gap:base_norm_cptni",
            "R" => "duality_gap:R",
            "Rprime" => "duality_gap:Rprime",
            _ => "duality_gap:Rdoubleprime",
        };
        checks.push(CheckRow::test(
            name,
            rel <= GAP_CEILING,
            format!(
                "normalized gap {} (ceiling {})",
                output::format_f64(rel),
                output::format_f64(GAP_CEILING)
            ),
        ));
    }

    checks.push(CheckRow::test(
        "base_norm_dominates_diamond",
        cptni.value >= dia.value - CHECK_TOL,
        ge_detail(cptni.value, dia.value),
    ));
    checks.push(CheckRow::test(
        "base_norm_below_twice_diamond",
        2.0 * dia.value >= cptni.value - CHECK_TOL,
        ge_detail(2.0 * dia.value, cptni.value),
    ));
    checks.push(CheckRow::test(
        "robustness_dominates_one_sided",
        r.value >= rp.value - CHECK_TOL,
        ge_detail(r.value, rp.value),
    ));
    checks.push(CheckRow::test(
        "robustness_dominates_cp_restoration",
        r.value >= rpp.value - CHECK_TOL,
        ge_detail(r.value, rpp.value),
    ));

    if class.tp {
        checks.push(CheckRow::test(
            "tp_collapse:R_equals_Rprime",
            (r.value - rp.value).abs() <= CHECK_TOL,
            eq_detail(r.value, rp.value),
        ));
        checks.push(CheckRow::test(
            "tp_collapse:R_equals_Rdoubleprime",
            (r.value - rpp.value).abs() <= CHECK_TOL,
            eq_detail(r.value, rpp.value),
        ));
        checks.push(CheckRow::test(
            "tp_collapse:R_from_diamond",
            (r.value - (dia.value - 1.0) / 2.0).abs() <= CHECK_TOL,
            eq_detail(r.value, (dia.value - 1.0) / 2.0),
        ));
        checks.push(CheckRow::test(
            "tp_collapse:R_from_base_norm",
            (r.value - (cptni.value - 1.0) / 2.0).abs() <= CHECK_TOL,
            eq_detail(r.value, (cptni.value - 1.0) / 2.0),
        ));
    } else {
        for name in [
            "tp_collapse:R_equals_Rprime",
            "tp_collapse:R_equals_Rdoubleprime",
            "tp_collapse:R_from_diamond",
            "tp_collapse:R_from_base_norm",
        ] {
            checks.push(CheckRow::skipped(name, "map is not trace preserving"));
        }
    }

    if class.cp {
        let marg = partial_trace(map.choi(), map.d_in(), map.d_out(), Subsystem::A)?;
        let norm = operator_norm(&marg);
        checks.push(CheckRow::test(
            "cp_equality:diamond_is_marginal_norm",
            (dia.value - norm).abs() <= CHECK_TOL,
            eq_detail(dia.value, norm),
        ));
        checks.push(CheckRow::test(
            "cp_equality:base_norm_is_marginal_norm",
            (cptni.value - norm).abs() <= CHECK_TOL,
            eq_detail(cptni.value, norm),
        ));
    } else {
        for name in [
            "cp_equality:diamond_is_marginal_norm",
            "cp_equality:base_norm_is_marginal_norm",
        ] {
            checks.push(CheckRow::skipped(name, "map is not completely positive"));
        }
    }

    let mut report = bounds_trace_norm(&map)?;
    report.merge(bounds_upper(&map)?);
    report.merge(bounds_lower(&map, &[])?);
    match report.check_consistency() {
        Ok(()) => checks.push(CheckRow::test(
            "bounds_consistent",
            true,
            "every lower bound sits below every upper bound".into(),
        )),
        Err(e) => checks.push(CheckRow::test("bounds_consistent", false, e.to_string())),
    }
    for res in results {
        let name: &'static str = match res.measure.as_str() {
            "diamond_norm" => "bounds_bracket:diamond_norm",
            "base_norm_cptni" => "bounds_bracket:base_norm_cptni",
            "R" => "bounds_bracket:R",
            "Rprime" => "bounds_bracket:Rprime",
            _ => "bounds_bracket:Rdoubleprime",
        };
        match report.check_value(&res.measure, res.value) {
            Ok(()) => checks.push(CheckRow::test(
                name,
                true,
                format!("value {} inside bracket", output::format_f64(res.value)),
            )),
            Err(e) => checks.push(CheckRow::test(name, false, e.to_string())),
        }
    }

    let passed = checks.iter().all(|c| c.status != "fail");

    let mut measures = Map::new();
    for res in results {
        measures.insert(res.measure.clone(), float_value(res.value));
    }
    let check_rows: Vec<Value> = checks
        .iter()
        .map(|c| {
            let mut row = Map::new();
            row.insert("name".into(), Value::String(c.name.into()));
            row.insert("status".into(), Value::String(c.status.into()));
            row.insert("detail".into(), Value::String(c.detail.clone()));
            Value::Object(row)
        })
        .collect();

    let mut obj = ctx.envelope("verify", source, &map);
    obj.insert("measures".into(), Value::Object(measures));
    obj.insert("checks".into(), Value::Array(check_rows));
    obj.insert("passed".into(), Value::Bool(passed));
    ctx.dump_programs(
        &map,
        source,
        &[
            "R",
            "Rdoubleprime",
            "Rprime",
            "base_norm_cptni",
            "diamond_norm",
        ],
    )?;
    ctx.emit(&Value::Object(obj))?;
    Ok(if passed { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// nonmarkov

/// Parse a family mini-spec `name?k=v&k=v` with float-valued parameters.
fn family_from_spec(spec: &str) -> Result<(ChannelFamily, &str)> {
    let (name, query) = match spec.split_once('?') {
        Some((n, q)) => (n, q),
        None => (spec, ""),
    };
    let mut params: Vec<(&str, f64)> = Vec::new();
    if !query.is_empty() {
        for item in query.split('&') {
            let (k, v) = item.split_once('=').ok_or_else(|| {
                Error::Parse(format!(
                    "malformed family parameter '{item}' (expected key=value)"
                ))
            })?;
            let parsed = v
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("family parameter '{k}'='{v}' is not a number")))?;
            params.push((k, parsed));
        }
    }
    Ok((builtin_family(name, &params)?, name))
}

pub fn cmd_nonmarkov(
    ctx: &Ctx,
    family_spec: &str,
    t_min: f64,
    t_max: f64,
    steps: usize,
    eps: f64,
) -> Result<i32> {
    if ctx.dump_sdp.is_some() {
        return Err(Error::Validation(
            "--dump-sdp: the divisibility scan solves a stream of propagator programs; \
             there is no single program to dump"
                .into(),
        ));
    }
    let (family, name) = family_from_spec(family_spec)?;
    let report = i_dia_window(&family, t_min, t_max, steps, eps, &ctx.opts)?;

    let mut fam_obj = Map::new();
    fam_obj.insert("source".into(), Value::String(family_spec.into()));
    fam_obj.insert("name".into(), Value::String(name.into()));
    fam_obj.insert("dim".into(), Value::from(family.dim() as u64));
    fam_obj.insert("domain_t_max".into(), float_value(family.t_max()));

    let mut obj = Map::new();
    obj.insert("schema".into(), Value::from(SCHEMA));
    obj.insert("command".into(), Value::String("nonmarkov".into()));
    obj.insert("family".into(), Value::Object(fam_obj));
    obj.insert("options".into(), ctx.options_value());
    obj.insert(
        "report".into(),
        serde_json::to_value(&report)
            .map_err(|e| Error::Validation(format!("report serialization: {e}")))?,
    );
    obj.insert("cp_divisible".into(), Value::Bool(report.cp_divisible()));
    ctx.emit(&Value::Object(obj))?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// shared JSON helpers

fn cone_program_value(p: &ConeProgram) -> Value {
    let blocks: Vec<Value> = p
        .blocks
        .iter()
        .map(|b| {
            let mut obj = Map::new();
            let (kind, size) = match *b {
                Block::Psd(side) => ("psd", side),
                Block::NonNeg(len) => ("nonneg", len),
                Block::Free(len) => ("free", len),
            };
            obj.insert("type".into(), Value::String(kind.into()));
            obj.insert("size".into(), Value::from(size as u64));
            Value::Object(obj)
        })
        .collect();
    let floats = |v: &[f64]| Value::Array(v.iter().map(|x| float_value(*x)).collect());
    let n = p.num_vars();
    let rows: Vec<Value> = (0..p.num_rows())
        .map(|i| floats(&p.constraint_matrix[i * n..(i + 1) * n]))
        .collect();
    let mut obj = Map::new();
    obj.insert("num_vars".into(), Value::from(p.num_vars() as u64));
    obj.insert("num_rows".into(), Value::from(p.num_rows() as u64));
    obj.insert("blocks".into(), Value::Array(blocks));
    obj.insert("objective".into(), floats(&p.objective));
    obj.insert("rhs".into(), floats(&p.rhs));
    obj.insert("constraint_matrix".into(), Value::Array(rows));
    Value::Object(obj)
}
