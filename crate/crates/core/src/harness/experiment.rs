//! Experiment execution.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;

use super::budget::{budget_for, check};
use super::config::{parse_input, Experiment, ExperimentConfig};
use super::registry::{RecognizerKind, RecognizerName, RunContext};
use super::report::{ExactRow, InputRow, Report, Summary};
use super::stats::{AcceptanceEstimate, StatsSummary};
use crate::classical::{freivalds_compare, freivalds_exact, FreivaldsParams, SamplingMode};
use crate::coin::{exact_error_probability, toss_campaign};
use crate::error::{Error, Result};
use crate::model::rng::trial_seed;
use crate::model::{Decision, RandomSource, RunStats, SubsetOracle, Word};
use crate::oracles::{enumerate_members, mutate_near_members, oracle_membership};
use crate::quantum::adh_accept_probability;
use crate::quantum::rtqcfa::sample_rounds;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

fn ratio_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// The inputs of a recognize experiment in report order: literals, then
/// enumerated members, then mutants of those members.
pub fn collect_inputs(cfg: &ExperimentConfig) -> Result<Vec<Word>> {
    let Experiment::Recognize {
        recognizer,
        inputs,
        enumerate,
        mutants,
    } = &cfg.experiment
    else {
        return Ok(Vec::new());
    };
    let lang = recognizer.language();
    let oracle = cfg.oracle()?;
    let mut words = inputs
        .iter()
        .map(|s| parse_input(s, lang))
        .collect::<Result<Vec<_>>>()?;
    if let Some(bound) = enumerate {
        let members = enumerate_members(lang, *bound, oracle.as_ref())?;
        let mut extra = Vec::new();
        if let Some(budget) = mutants {
            for m in &members {
                extra.extend(mutate_near_members(lang, m, *budget, oracle.as_ref())?);
            }
        }
        words.extend(members);
        words.extend(extra);
    }
    Ok(words)
}

/// Runs `cfg` and assembles its report. Trials run in parallel; results
/// are reduced in input then trial order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let oracle = cfg.oracle()?;
    let mut report = Report {
        version: VERSION.into(),
        config: cfg.clone(),
        language: None,
        rows: Vec::new(),
        exact: Vec::new(),
        summary: Summary::default(),
    };
    match &cfg.experiment {
        Experiment::Recognize { recognizer, .. } => {
            report.language = Some(recognizer.language());
            let ctx = RunContext {
                oracle: oracle.clone(),
                repetitions: cfg.repetitions,
                freivalds: cfg.freivalds,
                tape: cfg.tape,
                l: cfg.l_value()?,
            };
            for (index, w) in collect_inputs(cfg)?.iter().enumerate() {
                let row = recognize_row(cfg, *recognizer, &ctx, index, w)?;
                report.summary.inputs += 1;
                if !row.agrees {
                    report.summary.disagreements += 1;
                    if recognizer.is_exact() {
                        report.summary.hard_disagreements += 1;
                    }
                }
                if !row.budget.pass {
                    report.summary.budget_failures += 1;
                }
                if row.inconclusive > 0 {
                    report.summary.inconclusive += 1;
                }
                report.rows.push(row);
            }
        }
        Experiment::Lemma1 { k } => {
            let o = oracle.as_ref().expect("validated");
            report.exact = lemma1_rows(cfg, o, *k)?;
        }
        Experiment::Freivalds { len_a, len_b } => {
            report.exact = freivalds_rows(cfg, *len_a, *len_b)?;
        }
        Experiment::Adh { j } => {
            let o = oracle.as_ref().expect("validated");
            let out = adh_accept_probability(o, *j)?;
            let bit = o.query(*j)?;
            let certified = out.certified_correct(bit);
            let bound = BigRational::new(49.into(), 50.into());
            report.exact.push(ExactRow {
                name: format!("adh-correct j={j}"),
                exact: Some(certified.to_string()),
                value: out.correct(bit),
                bound: Some(bound.to_string()),
                estimate: None,
                pass: certified > bound,
            });
        }
    }
    report.summary.failed_checks = report.exact.iter().filter(|r| !r.pass).count();
    Ok(report)
}

fn recognize_row(
    cfg: &ExperimentConfig,
    rec: RecognizerName,
    ctx: &RunContext,
    index: usize,
    w: &Word,
) -> Result<InputRow> {
    let expected = oracle_membership(rec.language(), w, ctx.oracle.as_ref())?;
    let capped = |s: &RunStats| cfg.max_steps.is_some_and(|m| s.steps > BigUint::from(m));
    let mut row = InputRow {
        index,
        input: w.to_string(),
        length: w.len().to_string(),
        oracle: expected,
        accepts: 0,
        rejects: 0,
        inconclusive: 0,
        estimate: AcceptanceEstimate::exact(0.0, None),
        sampled: None,
        rounds_median: None,
        log2_expected_rounds: None,
        stats: StatsSummary::default(),
        budget: check(&budget_for(rec, w, ctx.repetitions), &[]),
        agrees: true,
    };
    match rec.kind() {
        RecognizerKind::Quantum => {
            let q = rec.evaluate(w, ctx)?;
            row.estimate = AcceptanceEstimate::exact(q.accept, q.exact.clone());
            row.log2_expected_rounds = Some(q.log2_expected_rounds);
            row.agrees = (q.accept > 0.5) == expected;
            if cfg.sample_rounds && cfg.trials > 0 {
                if let (Some(round), Some(_)) = (&q.round, &q.exact) {
                    let draws = (0..cfg.trials)
                        .into_par_iter()
                        .map(|t| {
                            let mut rng = RandomSource::new(trial_seed(cfg.seed, index as u64, t));
                            sample_rounds(round, &mut rng)
                        })
                        .collect::<Result<Vec<_>>>()?;
                    let accepts = draws.iter().filter(|d| d.0.is_accept()).count() as u64;
                    let mut rounds: Vec<&BigUint> = draws.iter().map(|d| &d.1).collect();
                    rounds.sort();
                    row.rounds_median = Some(rounds[rounds.len() / 2].to_string());
                    row.accepts = accepts;
                    row.rejects = cfg.trials - accepts;
                    row.sampled = Some(AcceptanceEstimate::monte_carlo(
                        accepts,
                        cfg.trials,
                        cfg.confidence,
                    )?);
                }
            }
        }
        RecognizerKind::Deterministic => {
            let s = rec.run(w, ctx, &mut RandomSource::new(cfg.seed))?;
            tally(&mut row, &s, capped(&s));
            let accept = row.accepts == 1;
            row.estimate = AcceptanceEstimate::exact(
                if accept { 1.0 } else { 0.0 },
                Some(if accept { "1" } else { "0" }.into()),
            );
            row.agrees = row.inconclusive > 0 || accept == expected;
            row.budget = check(&row.budget.budget, std::slice::from_ref(&s));
            row.stats = StatsSummary::of(std::slice::from_ref(&s));
        }
        RecognizerKind::Probabilistic => {
            let runs = (0..cfg.trials)
                .into_par_iter()
                .map(|t| {
                    let mut rng = RandomSource::new(trial_seed(cfg.seed, index as u64, t));
                    rec.run(w, ctx, &mut rng)
                })
                .collect::<Result<Vec<_>>>()?;
            for s in &runs {
                tally(&mut row, s, capped(s));
            }
            row.estimate =
                AcceptanceEstimate::monte_carlo(row.accepts, cfg.trials, cfg.confidence)?;
            let decided = row.accepts + row.rejects;
            row.agrees = decided == 0 || (2 * row.accepts > decided) == expected;
            row.budget = check(&row.budget.budget, &runs);
            row.stats = StatsSummary::of(&runs);
        }
    }
    Ok(row)
}

fn tally(row: &mut InputRow, s: &RunStats, capped: bool) {
    match s.decision {
        _ if capped => row.inconclusive += 1,
        Decision::Accept => row.accepts += 1,
        Decision::Reject => row.rejects += 1,
        Decision::CapExceeded | Decision::Restart => row.inconclusive += 1,
    }
}

fn lemma1_rows(cfg: &ExperimentConfig, o: &SubsetOracle, k: u32) -> Result<Vec<ExactRow>> {
    let err = exact_error_probability(o, k)?;
    let quarter = BigRational::new(1.into(), 4.into());
    let success = BigRational::one() - &err;
    let mut rows = vec![ExactRow {
        name: format!("lemma1-error k={k}"),
        exact: Some(err.to_string()),
        value: ratio_f64(&err),
        bound: Some(quarter.to_string()),
        estimate: None,
        pass: err <= quarter,
    }];
    if cfg.trials > 0 {
        let bit = o.query(u64::from(k))?;
        let hits = (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = RandomSource::new(trial_seed(cfg.seed, 0, t));
                toss_campaign(o, k, &mut rng).map(|c| c.extract_bit() == bit)
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .filter(|&ok| ok)
            .count() as u64;
        let est = AcceptanceEstimate::monte_carlo(hits, cfg.trials, cfg.confidence)?;
        let p = ratio_f64(&success);
        rows.push(ExactRow {
            name: format!("lemma1-success k={k}"),
            exact: Some(success.to_string()),
            value: p,
            bound: None,
            pass: est.covers(p),
            estimate: Some(est),
        });
    }
    Ok(rows)
}

fn freivalds_rows(cfg: &ExperimentConfig, len_a: u32, len_b: u32) -> Result<Vec<ExactRow>> {
    let exact = freivalds_exact(len_a, len_b, &cfg.freivalds)?;
    let win_a = ratio_f64(&exact.win_a);
    // One decisive round per trial, flipping every coin.
    let single = FreivaldsParams {
        decisive: 1,
        mode: SamplingMode::Literal,
        ..cfg.freivalds
    };
    let (a, b) = (BigUint::from(len_a), BigUint::from(len_b));
    let outcomes = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = RandomSource::new(trial_seed(cfg.seed, 0, t));
            freivalds_compare(&a, &b, &single, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    if outcomes.iter().any(|o| o.wins_a + o.wins_b != 1) {
        return Err(Error::CapExceeded(
            "a decisive round hit the round cap".into(),
        ));
    }
    let wins = outcomes.iter().map(|o| u64::from(o.wins_a)).sum::<u64>();
    let est = AcceptanceEstimate::monte_carlo(wins, cfg.trials, cfg.confidence)?;
    let nine_tenths = BigRational::new(9.into(), 10.into());
    let (lo, hi) = (len_a.min(len_b), len_a.max(len_b));
    let (bound, pass) = if lo == hi {
        let p_equal = BigRational::one() - &exact.p_unequal;
        (Some("P[equal] ≥ 9/10".to_string()), p_equal >= nine_tenths)
    } else if hi >= 2 * lo {
        (
            Some("P[unequal] ≥ 9/10".to_string()),
            exact.p_unequal >= nine_tenths,
        )
    } else {
        (None, true)
    };
    Ok(vec![
        ExactRow {
            name: format!("freivalds-win-a {len_a},{len_b}"),
            exact: Some(exact.win_a.to_string()),
            value: win_a,
            bound: None,
            pass: est.covers(win_a),
            estimate: Some(est),
        },
        ExactRow {
            name: format!("freivalds-unequal {len_a},{len_b}"),
            exact: Some(exact.p_unequal.to_string()),
            value: ratio_f64(&exact.p_unequal),
            bound,
            estimate: None,
            pass,
        },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::ReportFormat;
    use crate::harness::report::{emit_report, EXIT_OK};

    fn recognize(rec: RecognizerName, inputs: &[&str]) -> ExperimentConfig {
        ExperimentConfig::new(Experiment::Recognize {
            recognizer: rec,
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
            enumerate: None,
            mutants: None,
        })
    }

    #[test]
    fn lemma1_report() {
        let mut cfg = ExperimentConfig::new(Experiment::Lemma1 { k: 1 });
        cfg.prefix = Some("1".into());
        cfg.trials = 2000;
        let r = run_experiment(&cfg).unwrap();
        assert_eq!(r.exact.len(), 2);
        assert!(r.exact.iter().all(|e| e.pass));
        assert_eq!(r.exit_code(), EXIT_OK);
    }

    #[test]
    fn dima_exhaustive_has_no_disagreements() {
        let mut cfg = recognize(RecognizerName::DimaDca2, &[]);
        if let Experiment::Recognize {
            enumerate, mutants, ..
        } = &mut cfg.experiment
        {
            *enumerate = Some(1);
            *mutants = Some(20);
        }
        let r = run_experiment(&cfg).unwrap();
        assert!(r.summary.inputs > 5);
        assert_eq!(r.summary.disagreements, 0);
        assert!(r.rows.iter().filter(|x| x.oracle).count() >= 1);
    }

    #[test]
    fn trials_zero_is_rejected() {
        let mut cfg = recognize(RecognizerName::DimaIPca2, &["0"]);
        cfg.prefix = Some("1".into());
        cfg.trials = 0;
        assert!(matches!(run_experiment(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn reports_are_seed_deterministic() {
        let mut cfg = recognize(RecognizerName::Upower64IPtm1, &["n=64", "n=63"]);
        cfg.prefix = Some("1".into());
        cfg.trials = 200;
        cfg.seed = 9;
        let a = emit_report(&run_experiment(&cfg).unwrap(), ReportFormat::Json).unwrap();
        let b = emit_report(&run_experiment(&cfg).unwrap(), ReportFormat::Json).unwrap();
        assert_eq!(a, b);
        let csv = emit_report(&run_experiment(&cfg).unwrap(), ReportFormat::Csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 3);
    }

    #[test]
    fn max_steps_flags_inconclusive() {
        let mut cfg = recognize(RecognizerName::DimaDca2, &["0 1 0^2 1 0^4"]);
        cfg.max_steps = Some(3);
        let r = run_experiment(&cfg).unwrap();
        assert_eq!(r.rows[0].inconclusive, 1);
        assert_eq!(r.exit_code(), crate::harness::report::EXIT_BUDGET);
    }

    #[test]
    fn quantum_rows_are_exact() {
        let mut cfg = recognize(RecognizerName::PowerEqRtqcfa, &["a b a^7 b", "a b a^6 b"]);
        cfg.sample_rounds = true;
        cfg.trials = 100;
        let r = run_experiment(&cfg).unwrap();
        assert_eq!(r.rows[0].estimate.exact.as_deref(), Some("1"));
        assert_eq!(r.rows[0].accepts, 100);
        assert_eq!(r.rows[1].accepts, 0);
        assert_eq!(r.summary.disagreements, 0);
    }

    #[test]
    fn freivalds_and_adh_rows() {
        let mut cfg = ExperimentConfig::new(Experiment::Freivalds { len_a: 2, len_b: 4 });
        cfg.trials = 4000;
        let r = run_experiment(&cfg).unwrap();
        assert!(r.exact.iter().all(|e| e.pass), "{:?}", r.exact);
        let mut cfg = ExperimentConfig::new(Experiment::Adh { j: 2 });
        cfg.prefix = Some("101".into());
        let r = run_experiment(&cfg).unwrap();
        assert!(r.exact[0].pass);
    }

    #[test]
    fn report_json_round_trip() {
        let mut cfg = recognize(RecognizerName::DimaDca2, &["0 1 0^2", "1"]);
        cfg.seed = 1;
        let r = run_experiment(&cfg).unwrap();
        let bytes = emit_report(&r, ReportFormat::Json).unwrap();
        let back: Report = serde_json::from_slice(&bytes).unwrap();
        assert_eq!(back, r);
    }
}
