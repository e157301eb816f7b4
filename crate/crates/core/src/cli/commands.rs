use std::fmt::Write as _;
use std::path::Path;

use super::config::RunConfig;
use super::files::{self, parse_cr_file, parse_oracle_file, parse_vector};
use super::report::{verdict, Report};
use super::{Cli, CliError, Command, Sampler};
use crate::channel::MemoryChannel;
use crate::encoding::{encode_with, EncodeMode, Encoding};
use crate::error::Error;
use crate::experiments::{
    estimate_restart_rate, measure_scaling, monte_carlo_lemma2, proof_marginals, verify_lemma2,
};
use crate::field::{FieldMode, FieldParams};
use crate::leakage::{
    audit_budget, default_lambda, parse_adversary, run_game, serialize_shares_to_memory,
};
use crate::oracle::{LeakFreeOracle, OracleSampler, ScriptedOracle};
use crate::reconstruct::{check_reconstruction_constraints, reconstruct, CommonRandomness};
use crate::refresh::{refresh_with, verify_views, RefreshConfig};
use crate::rng::SeededRng;

/// Largest modulus for which `--sampler auto` picks rejection sampling.
pub const AUTO_REJECTION_MAX_P: u64 = crate::encoding::REJECTION_MAX_P;

/// What a command produced: the report, data files to write, and whether
/// every check passed.
#[derive(Debug, Clone)]
pub struct CommandOutput {
    pub report: Report,
    pub files: Vec<(String, String)>,
    pub passed: bool,
}

type CmdResult = Result<CommandOutput, CliError>;

fn mode(cli: &Cli) -> FieldMode {
    if cli.relaxed {
        FieldMode::Relaxed
    } else {
        FieldMode::Standard
    }
}

fn config(cli: &Cli, p: u64, n: usize, trials: u64) -> RunConfig {
    RunConfig {
        p,
        n,
        seed: cli.seed,
        mode: mode(cli),
        trials,
        restart_cap: cli.restart_cap,
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn in_file<T>(path: &Path, r: crate::Result<T>) -> Result<T, CliError> {
    r.map_err(|source| match source {
        e @ Error::Parse { .. } => CliError::File {
            path: path.to_owned(),
            source: e,
        },
        e => CliError::Lib(e),
    })
}

fn load_encoding(cli: &Cli, left: &Path, right: &Path) -> Result<Encoding, CliError> {
    let l = in_file(left, parse_vector(&read(left)?))?;
    let r = in_file(right, parse_vector(&read(right)?))?;
    if (l.p, l.n) != (r.p, r.n) {
        return Err(Error::ParamsMismatch(format!(
            "left share has p={} n={}, right share has p={} n={}",
            l.p, l.n, r.p, r.n
        ))
        .into());
    }
    let params = FieldParams::with_mode(l.p, l.n, mode(cli))?;
    Ok(Encoding::from_values(params, &l.values, &r.values)?)
}

fn set_vector(report: &mut Report, key: &str, values: &[u64]) {
    let s: Vec<String> = values.iter().map(u64::to_string).collect();
    report.set(key, s.join(","));
}

pub fn execute(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Encode {
            p,
            n,
            secret,
            sampler,
        } => cmd_encode(cli, *p, *n, *secret, *sampler),
        Command::Decode { left, right } => cmd_decode(cli, left, right),
        Command::Refresh {
            left,
            right,
            force_oracle,
        } => cmd_refresh(cli, left, right, force_oracle.as_deref()),
        Command::Reconstruct {
            left,
            right,
            new_left,
            new_right,
            cr,
        } => cmd_reconstruct(cli, left, right, new_left, new_right, cr.as_deref()),
        Command::VerifyLemma2 {
            p,
            n,
            exhaustive_inputs,
            left,
            right,
            monte_carlo,
            trials,
        } => {
            let files = left.as_deref().zip(right.as_deref());
            cmd_verify_lemma2(cli, *p, *n, *exhaustive_inputs, files, *monte_carlo, *trials)
        }
        Command::RestartRate { p, n, trials } => cmd_restart_rate(cli, *p, *n, *trials),
        Command::Bench {
            p,
            n,
            trials,
            timing,
        } => cmd_bench(cli, *p, n, *trials, *timing),
        Command::Game {
            p,
            n,
            lambda,
            adversary,
            secret,
            left,
            right,
            max_queries,
        } => {
            let files = left.as_deref().zip(right.as_deref());
            cmd_game(cli, *p, *n, *lambda, adversary, *secret, files, *max_queries)
        }
    }
}

fn cmd_encode(cli: &Cli, p: u64, n: usize, secret: u64, sampler: Sampler) -> CmdResult {
    let cfg = config(cli, p, n, 1);
    let params = cfg.params()?;
    let s = params.try_element(secret)?;
    let mode = match sampler {
        Sampler::Rejection => EncodeMode::Rejection,
        Sampler::Constructive => EncodeMode::Constructive,
        Sampler::Auto if p <= AUTO_REJECTION_MAX_P => EncodeMode::Rejection,
        Sampler::Auto => EncodeMode::Constructive,
    };
    let mut rng = SeededRng::new(cli.seed, "encode");
    let enc = encode_with(s, params, mode, &mut rng)?;
    let ok = enc.decode() == s;
    let mut report = Report::new("encode", &cfg);
    report.set(
        "sampler",
        match mode {
            EncodeMode::Rejection => "rejection",
            EncodeMode::Constructive => "constructive",
        },
    );
    report.set("secret", secret);
    set_vector(&mut report, "left", &enc.left().values());
    set_vector(&mut report, "right", &enc.right().values());
    report.set("check.decode", verdict(ok));
    report.set("result", verdict(ok));
    Ok(CommandOutput {
        files: vec![
            ("L.vec".into(), files::write_vector(enc.left(), &cfg)),
            ("R.vec".into(), files::write_vector(enc.right(), &cfg)),
        ],
        report,
        passed: ok,
    })
}

fn cmd_decode(cli: &Cli, left: &Path, right: &Path) -> CmdResult {
    let enc = load_encoding(cli, left, right)?;
    let k = enc.params();
    let cfg = config(cli, k.modulus(), k.dimension(), 1);
    let mut report = Report::new("decode", &cfg);
    report.set("secret", enc.decode().value());
    report.set("result", verdict(true));
    Ok(CommandOutput {
        report,
        files: Vec::new(),
        passed: true,
    })
}

fn cmd_refresh(cli: &Cli, left: &Path, right: &Path, force: Option<&Path>) -> CmdResult {
    let enc = load_encoding(cli, left, right)?;
    let k = enc.params();
    let cfg = config(cli, k.modulus(), k.dimension(), 1);
    let mut oracle: Box<dyn OracleSampler> = match force {
        Some(path) => Box::new(ScriptedOracle::strict(in_file(
            path,
            parse_oracle_file(&read(path)?, k),
        )?)),
        None => Box::new(LeakFreeOracle),
    };
    let mut rng = SeededRng::new(cli.seed, "refresh");
    let trace = refresh_with(
        &enc,
        oracle.as_mut(),
        &mut MemoryChannel::new(),
        &mut rng,
        RefreshConfig {
            restart_cap: cli.restart_cap,
        },
    )?;

    let n = k.dimension() as u64;
    let preserved = trace.output.decode() == enc.decode();
    let views_ok = verify_views(&trace, &enc);
    let ops_ok = trace.attempt_ops().all(|o| o.total() <= 8 * n);
    let passed = preserved && views_ok && ops_ok;

    let mut report = Report::new("refresh", &cfg);
    report.set("oracle", if force.is_some() { "forced" } else { "sampled" });
    report.set("secret", enc.decode().value());
    set_vector(&mut report, "left", &enc.left().values());
    set_vector(&mut report, "right", &enc.right().values());
    set_vector(&mut report, "new-left", &trace.output.left().values());
    set_vector(&mut report, "new-right", &trace.output.right().values());
    report.set("alpha", trace.alpha.value());
    report.set("restarts", trace.restarts);
    report.set("attempts", trace.attempts());
    for (i, f) in trace.failed_attempts.iter().enumerate() {
        report.set(format!("restart.{i}.step"), f.step.to_string());
    }
    report.set("messages", trace.messages.len());
    report.set("ops.adds", trace.op_count.adds);
    report.set("ops.muls", trace.op_count.muls);
    report.set("ops.invs", trace.op_count.invs);
    report.set("ops.total", trace.op_count.total());
    report.set("ops.all-attempts", trace.total_ops().total());
    report.set("ops.bound", 8 * n);
    report.set("check.inner-product", verdict(preserved));
    report.set("check.views", verdict(views_ok));
    report.set("check.ops", verdict(ops_ok));
    report.set("result", verdict(passed));

    Ok(CommandOutput {
        files: vec![
            ("L_prime.vec".into(), files::write_vector(trace.output.left(), &cfg)),
            ("R_prime.vec".into(), files::write_vector(trace.output.right(), &cfg)),
            ("view_L.txt".into(), files::write_view_l(&trace.view_l, &cfg)),
            ("view_R.txt".into(), files::write_view_r(&trace.view_r, &cfg)),
            ("transcript.txt".into(), files::write_transcript(&trace.messages, &cfg)),
        ],
        report,
        passed,
    })
}

fn cmd_reconstruct(
    cli: &Cli,
    left: &Path,
    right: &Path,
    new_left: &Path,
    new_right: &Path,
    cr: Option<&Path>,
) -> CmdResult {
    let enc = load_encoding(cli, left, right)?;
    let new = load_encoding(cli, new_left, new_right)?;
    let k = enc.params();
    if new.params() != k {
        return Err(Error::ParamsMismatch(format!("old shares {k}, new shares {}", new.params())).into());
    }
    let cfg = config(cli, k.modulus(), k.dimension(), 1);
    let (randomness, source) = match cr {
        Some(path) => (in_file(path, parse_cr_file(&read(path)?, k))?, "file"),
        None => (
            CommonRandomness::sample(k, &mut SeededRng::new(cli.seed, "reconstruct")),
            "sampled",
        ),
    };
    let (view_l, view_r) = reconstruct(&enc, &new, &randomness)?;
    let ok = check_reconstruction_constraints(&view_l, &view_r);

    let mut report = Report::new("reconstruct", &cfg);
    report.set("common-randomness", source);
    report.set("secret", enc.decode().value());
    set_vector(&mut report, "V", &randomness.v.values());
    set_vector(&mut report, "V~", &randomness.v_tilde.values());
    report.set("messages", 0u64);
    report.set("check.constraints", verdict(ok));
    report.set("result", verdict(ok));

    let mut out = vec![
        ("view_L.txt".into(), files::write_view_l(&view_l, &cfg)),
        ("view_R.txt".into(), files::write_view_r(&view_r, &cfg)),
    ];
    if cr.is_none() {
        out.push(("cr.txt".into(), files::write_cr(&randomness, &cfg)));
    }
    Ok(CommandOutput {
        report,
        files: out,
        passed: ok,
    })
}

fn cmd_verify_lemma2(
    cli: &Cli,
    p: u64,
    n: usize,
    exhaustive: bool,
    input_files: Option<(&Path, &Path)>,
    monte_carlo: bool,
    samples: u64,
) -> CmdResult {
    let params = FieldParams::with_mode(p, n, mode(cli))?;
    let inputs: Vec<Encoding> = if exhaustive {
        let mut v = Vec::new();
        for l in params.all_nonzero_vectors() {
            for r in params.all_nonzero_vectors() {
                v.push(Encoding::new(params, l.clone(), r)?);
            }
        }
        v
    } else if let Some((l, r)) = input_files {
        let enc = load_encoding(cli, l, r)?;
        if enc.params() != params {
            return Err(Error::ParamsMismatch(format!("--p/--n give {params}, files give {}", enc.params())).into());
        }
        vec![enc]
    } else {
        let mut rng = SeededRng::new(cli.seed, "verify-lemma2/input");
        vec![Encoding::new(
            params,
            params.sample_nonzero_vector(&mut rng),
            params.sample_nonzero_vector(&mut rng),
        )?]
    };
    let trials = if monte_carlo { samples } else { inputs.len() as u64 };
    let cfg = config(cli, p, n, trials);
    let mut report = Report::new("verify-lemma2", &cfg);
    report.set("method", if monte_carlo { "monte-carlo" } else { "exact" });
    report.set("inputs", inputs.len());
    let mut all = true;

    if monte_carlo {
        let rng = SeededRng::new(cli.seed, "verify-lemma2/mc");
        for (i, enc) in inputs.iter().enumerate() {
            let r = monte_carlo_lemma2(enc, samples, &rng.stream("input", i as u64))?;
            let key = |s: &str| format!("input.{i}.{s}");
            set_vector(&mut report, &key("left"), &enc.left().values());
            set_vector(&mut report, &key("right"), &enc.right().values());
            report.set(key("tv-full"), r.tv_full);
            report.set(key("baseline-full"), r.baseline_full);
            report.set(key("tv-shares"), r.tv_shares);
            report.set(key("baseline-shares"), r.baseline_shares);
            report.set(key("threshold-factor"), r.threshold_factor);
            report.set(key("support-full"), r.support_full);
            report.set(key("support-shares"), r.support_shares);
            if let Some(z) = r.shares_uniform_z {
                report.set(key("shares-uniform-z"), z);
            }
            report.set(key("result"), verdict(r.passed()));
            all &= r.passed();
        }
    } else {
        let mut facts = [
            ("a-uniform-nonzero", true),
            ("b-uniform-given-a-before-acceptance", true),
            ("b-uniform-on-support-given-a", true),
            ("b-uniform-full-given-a", true),
            ("v-determined", true),
            ("x-determined", true),
            ("r-prime-uniform-nonzero", true),
        ];
        for (i, enc) in inputs.iter().enumerate() {
            let r = verify_lemma2(enc)?;
            let m = proof_marginals(enc)?;
            let key = |s: &str| format!("input.{i}.{s}");
            set_vector(&mut report, &key("left"), &r.left);
            set_vector(&mut report, &key("right"), &r.right);
            report.set(key("support"), r.support_refresh);
            report.set(key("equal"), verdict(r.equal()));
            if let Some(d) = &r.first_discrepancy {
                let k: Vec<String> = d.outcome.canonical_key().iter().map(u64::to_string).collect();
                report.set(key("discrepancy.outcome"), k.join(","));
                report.set(key("discrepancy.refresh"), d.refresh.to_string());
                report.set(key("discrepancy.reconstruct"), d.reconstruct.to_string());
            }
            all &= r.equal();
            for (slot, value) in facts.iter_mut().zip([
                m.a_uniform_nonzero,
                m.b_uniform_full_given_a_raw,
                m.b_uniform_on_support_given_a,
                m.b_uniform_full_given_a,
                m.v_determined,
                m.x_determined,
                m.r_prime_uniform_nonzero,
            ]) {
                slot.1 &= value;
            }
        }
        for (name, value) in facts {
            report.set(format!("marginal.{name}"), value);
        }
        // B given A loses one value per coordinate once acceptance is
        // conditioned on; that fact is reported, not required.
        let required = facts.iter().filter(|(k, _)| *k != "b-uniform-full-given-a").all(|f| f.1);
        report.set("check.marginals", verdict(required));
        all &= required;
    }
    report.set("result", verdict(all));
    Ok(CommandOutput {
        report,
        files: Vec::new(),
        passed: all,
    })
}

fn cmd_restart_rate(cli: &Cli, p: u64, n: usize, trials: u64) -> CmdResult {
    let cfg = config(cli, p, n, trials);
    let r = estimate_restart_rate(cfg.params()?, trials, &SeededRng::new(cli.seed, "restart-rate"))?;
    let mut report = Report::new("restart-rate", &cfg);
    report.set("attempts", r.attempts);
    report.set("restarts", r.restarts);
    report.set("rate", r.rate);
    report.set("wilson.low", r.wilson.low);
    report.set("wilson.high", r.wilson.high);
    report.set("wilson.z", crate::experiments::restart::WILSON_Z);
    report.set("bound", r.bound);
    report.set("allowed", r.bound + crate::experiments::restart::SLACK_WIDTHS * r.half_width());
    report.set("check.bound", verdict(r.within_bound()));
    report.set("check.at-most-half", verdict(r.rate <= 0.5));
    report.set("result", verdict(r.passed()));
    Ok(CommandOutput {
        report,
        files: Vec::new(),
        passed: r.passed(),
    })
}

fn cmd_bench(cli: &Cli, p: u64, ns: &[usize], trials: u64, timing: bool) -> CmdResult {
    let largest = ns.iter().copied().max().unwrap_or(0);
    let cfg = config(cli, p, largest, trials);
    if cli.relaxed {
        return Err(Error::Precondition("bench requires standard mode".into()).into());
    }
    let r = measure_scaling(ns, p, trials, &SeededRng::new(cli.seed, "bench"))?;
    let mut report = Report::new("bench", &cfg);
    let list: Vec<String> = ns.iter().map(usize::to_string).collect();
    report.set("n-values", list.join(","));
    for q in &r.points {
        let key = |s: &str| format!("n.{}.{s}", q.n);
        report.set(key("mean-ops"), q.mean_ops);
        report.set(key("mean-attempts"), q.mean_attempts);
        report.set(key("max-attempt-ops"), q.max_attempt_ops);
        report.set(key("bound"), 8 * q.n as u64);
        if timing {
            report.set(key("mean-wall-ns"), q.mean_wall_ns);
        }
    }
    for (a, b, ratio) in &r.ratios {
        report.set(format!("ratio.{a}-{b}"), *ratio);
    }
    report.set("fit.slope", r.slope());
    report.set("fit.intercept", r.intercept());
    report.set("fit.r2-linear", r.linear.r_squared);
    report.set("fit.r2-quadratic", r.quadratic.r_squared);
    report.set("check.attempt-bound", verdict(r.bound_ok()));
    report.set("check.ratios", verdict(r.ratios_ok()));
    report.set(
        "check.no-quadratic-gain",
        verdict(r.quadratic_gain() <= crate::experiments::scaling::QUADRATIC_GAIN_LIMIT),
    );
    report.set("result", verdict(r.passed()));
    Ok(CommandOutput {
        report,
        files: Vec::new(),
        passed: r.passed(),
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_game(
    cli: &Cli,
    p: u64,
    n: usize,
    lambda: Option<usize>,
    adversary: &str,
    secret: Option<u64>,
    input_files: Option<(&Path, &Path)>,
    max_queries: usize,
) -> CmdResult {
    let params = FieldParams::with_mode(p, n, mode(cli))?;
    let mut rng = SeededRng::new(cli.seed, "game");
    let enc = match input_files {
        Some((l, r)) => {
            let enc = load_encoding(cli, l, r)?;
            if enc.params() != params {
                return Err(Error::ParamsMismatch(format!("--p/--n give {params}, files give {}", enc.params())).into());
            }
            enc
        }
        None => {
            let s = match secret {
                Some(s) => params.try_element(s)?,
                None => params.sample_nonzero(&mut rng),
            };
            crate::encoding::encode(s, params, &mut rng)?
        }
    };
    let lambda = lambda.unwrap_or_else(|| default_lambda(params));
    let mut adv = parse_adversary(adversary)?;
    let memory = serialize_shares_to_memory(&enc);
    let part_len = memory.part_len();
    let cfg = config(cli, p, n, 1);
    let (outcome, abort) = match run_game(memory, &mut adv, lambda, max_queries) {
        Ok(o) => (Some(o.output.clone()), (o.log, None)),
        Err(a) => (None, (a.log, Some(a.reason))),
    };
    let (log, abort) = abort;
    let audit = audit_budget(&log, 2, lambda);

    let mut report = Report::new("game", &cfg);
    report.set("lambda", lambda);
    report.set("parts", 2u64);
    report.set("part-bits", part_len);
    report.set("adversary", adversary);
    report.set("queries", log.len());
    report.set(
        "answered",
        log.iter().filter(|r| matches!(r.outcome, crate::leakage::QueryOutcome::Answered(_))).count(),
    );
    report.set(
        "refused",
        log.iter().filter(|r| matches!(r.outcome, crate::leakage::QueryOutcome::Refused(_))).count(),
    );
    for (i, b) in audit.leaked.iter().enumerate() {
        report.set(format!("leaked.part{i}"), *b);
    }
    if let Some(out) = &outcome {
        report.set("output", out.to_string());
    }
    if let Some(e) = &abort {
        report.set("abort", e.to_string());
    }
    report.set("check.budget-audit", verdict(audit.passed()));
    report.set("result", verdict(audit.passed() && abort.is_none()));

    let mut text = format!("lrs-game-log v1 p={p} n={n} lambda={lambda} parts=2\n{}\n", cfg.comment_line());
    for r in &log {
        writeln!(text, "{r}").unwrap();
    }
    if let Some(e) = abort {
        return Err(e.into());
    }
    Ok(CommandOutput {
        passed: audit.passed(),
        report,
        files: vec![("game_log.txt".into(), text)],
    })
}
