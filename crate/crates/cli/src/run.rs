//! The subcommands as library functions. Each returns a [`Report`] whose
//! status maps to the process exit code.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use moduli_core::suite::{full_suite, InvariantResult, SuiteOptions};
use moduli_core::{
    find_central_rep, CentralRep, KaehlerHodgePackage, KuranishiChart, LieContext, RepStrategy,
    TwistedComplex,
};

use crate::config::ExperimentConfig;
use crate::repfile::{self, RepFileError};
use crate::report::{
    ChartSummary, InvariantRecord, RepSummary, Report, SampleRow, SampleSummary, Status, Witness,
};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Core(#[from] moduli_core::Error),
    #[error(transparent)]
    RepFile(#[from] RepFileError),
    #[error("{0}")]
    Invalid(String),
}

/// Produces the configured representation, either from its strategy or from
/// the representation file.
pub fn build_rep(config: &ExperimentConfig) -> Result<CentralRep, RunError> {
    let ctx = LieContext::new(config.group_id);
    if config.rep_strategy == RepStrategy::FromFile {
        let path = config
            .rep_file
            .as_ref()
            .ok_or_else(|| RunError::Invalid("rep_strategy from-file needs rep_file".into()))?;
        let rep = repfile::read_rep(path)?;
        if rep.context().group_id() != config.group_id || rep.genus() != config.genus {
            return Err(RunError::Invalid(format!(
                "representation file holds a genus-{} {} representation, configuration asks for genus-{} {}",
                rep.genus(),
                rep.context().group_id(),
                config.genus,
                config.group_id
            )));
        }
        return Ok(rep);
    }
    let mut rng = moduli_core::rng::stream(config.seed, "cli.find_rep");
    Ok(find_central_rep(
        &ctx,
        config.genus,
        &config.central_value(&ctx),
        config.central_twist,
        config.rep_strategy,
        &config.tolerances,
        &mut rng,
    )?)
}

pub fn build_chart(config: &ExperimentConfig, rep: CentralRep) -> Result<KuranishiChart, RunError> {
    let complex =
        TwistedComplex::build_with_admission(rep, config.tolerances.get("defect_admission"))?;
    let package = match &config.base_weights {
        Some(w) => KaehlerHodgePackage::build_with_base_weights(complex, w)?,
        None => KaehlerHodgePackage::build(complex)?,
    };
    Ok(KuranishiChart::from_package(package, config.seed)
        .with_tolerances(config.tolerances.clone()))
}

fn rep_summary(chart: &KuranishiChart) -> RepSummary {
    let cx = chart.complex();
    let rep = chart.rep();
    RepSummary {
        group_id: rep.context().group_id().to_string(),
        genus: rep.genus(),
        defect: rep.defect(),
        stabilizer_dim: chart.stabilizer().dim(),
        stabilizer_samples: chart.stabilizer().samples.len(),
        betti: cx.betti(),
        euler_characteristic: cx.euler_characteristic(),
    }
}

pub fn chart_summary(chart: &KuranishiChart) -> ChartSummary {
    let ns = chart.nonsingular_report();
    ChartSummary {
        ball_radius: chart.ball_radius(),
        homotopy_norm: chart.norm_h(),
        h1_dim: chart.h1_dim(),
        z_dim: chart.z_dim(),
        nonsingular: ns.nonsingular,
        infinitesimal_action: ns.infinitesimal,
        sampled_action: ns.sampled,
        momentum_max: ns.momentum,
        witness: chart.theta_witness().map(|(xi, theta_norm)| Witness {
            xi: xi.iter().copied().collect(),
            theta_norm,
        }),
    }
}

fn record(r: &InvariantResult) -> InvariantRecord {
    InvariantRecord {
        name: r.name.clone(),
        residual: r.residual,
        tolerance_name: r.tolerance_name.clone(),
        tolerance: r.tolerance,
        comparison: r.comparison.as_str().to_string(),
        vacuous: r.vacuous,
        passed: r.passed,
    }
}

fn fail_with(mut report: Report, e: impl std::fmt::Display) -> Report {
    report.status = Status::Error;
    report.error = Some(e.to_string());
    report
}

fn settle(mut report: Report) -> Report {
    report.status = if report.invariants.iter().all(|r| r.passed) {
        Status::Pass
    } else {
        Status::Fail
    };
    report
}

/// Builds the representation and chart and runs the full named invariant suite.
pub fn run_verify(config: &ExperimentConfig) -> Report {
    let mut report = Report::new("verify", config.echo());
    let chart = match build_rep(config).and_then(|rep| build_chart(config, rep)) {
        Ok(c) => c,
        Err(e) => return fail_with(report, e),
    };
    report.rep = Some(rep_summary(&chart));
    report.chart = Some(chart_summary(&chart));
    let opts = SuiteOptions {
        samples: config.suite_samples,
        taylor_cocycles: config.taylor_cocycles,
        seed: config.seed,
    };
    report.invariants = full_suite(&chart, &config.tolerances, opts)
        .iter()
        .map(record)
        .collect();
    settle(report)
}

/// Builds the chart and samples the reduced local model.
pub fn run_chart(config: &ExperimentConfig) -> Report {
    let mut report = Report::new("chart", config.echo());
    if config.sample_count == 0 {
        return fail_with(report, "chart needs sample_count > 0");
    }
    let chart = match build_rep(config).and_then(|rep| build_chart(config, rep)) {
        Ok(c) => c,
        Err(e) => return fail_with(report, e),
    };
    report.rep = Some(rep_summary(&chart));
    report.chart = Some(chart_summary(&chart));
    let sample = chart.reduced_sample(config.sample_count, config.seed);
    let table: Vec<SampleRow> = sample
        .records
        .iter()
        .map(|r| SampleRow {
            index: r.index,
            xi_norm: chart.norm1(&r.xi),
            from_cone: r.from_cone,
            theta_norm: r.theta_norm,
            kept: r.kept,
            label: r.label,
            polish_defect: r.polish.as_ref().map(|p| p.defect),
            polish_iterations: r.polish.as_ref().map(|p| p.iterations),
            image_in_ball: r.polish.as_ref().map(|p| p.image_in_ball),
            image_on_cone: r.polish.as_ref().map(|p| p.image_on_cone),
            chart_momentum: r.chart_momentum,
            contradiction: r.contradiction,
            failure: r.failure.clone(),
        })
        .collect();
    let max_kept_polish_defect = sample
        .records
        .iter()
        .filter(|r| r.kept)
        .map(|r| r.polish.as_ref().map_or(f64::INFINITY, |p| p.defect))
        .reduce(f64::max);
    report.invariants.push(InvariantRecord {
        name: "samples.contradictions".into(),
        residual: sample.contradictions as f64,
        tolerance_name: "exact".into(),
        tolerance: 0.0,
        comparison: "le".into(),
        vacuous: sample.records.is_empty(),
        passed: sample.contradictions == 0,
    });
    if let Some(d) = max_kept_polish_defect {
        let tol = config.tolerances.get("polish_defect");
        report.invariants.push(InvariantRecord {
            name: "samples.kept_polish_defect".into(),
            residual: d,
            tolerance_name: "polish_defect".into(),
            tolerance: tol,
            comparison: "le".into(),
            vacuous: false,
            passed: d <= tol,
        });
    }
    report.samples = Some(SampleSummary {
        count: sample.records.len(),
        kept: sample.kept,
        kept_fraction: sample.kept_fraction(),
        labels: sample.labels,
        contradictions: sample.contradictions,
        local_dimension: sample.local_dimension,
        min_label_separation: sample.min_label_separation,
        cluster_radius: sample.cluster_radius,
        separation_factor: sample.separation_factor,
        max_kept_polish_defect,
        table,
    });
    settle(report)
}

/// Runs [`run_chart`] for `count` consecutive seeds starting at the configured one.
pub fn run_sweep(config: &ExperimentConfig, count: usize) -> Vec<Report> {
    (0..count as u64)
        .into_par_iter()
        .map(|k| {
            let mut c = config.clone();
            c.seed = config.seed.wrapping_add(k);
            run_chart(&c)
        })
        .collect()
}

pub fn sweep_path(dir: &Path, seed: u64) -> PathBuf {
    dir.join(format!("chart-{seed}.json"))
}

/// Plain-text summary of a report.
pub fn describe(report: &Report) -> String {
    let mut out = format!(
        "{} report (version {}), seed {}: {:?}\n",
        report.command, report.version, report.seed, report.status
    );
    let c = &report.config;
    out += &format!(
        "  {} genus {}, strategy {}, central target {:?}, twist {}\n",
        c.group_id, c.genus, c.rep_strategy, c.central_target, c.central_twist
    );
    if let Some(e) = &report.error {
        out += &format!("  error: {e}\n");
    }
    if let Some(r) = &report.rep {
        out += &format!(
            "  defect {:.3e}, betti {:?}, stabilizer dim {} ({} samples)\n",
            r.defect, r.betti, r.stabilizer_dim, r.stabilizer_samples
        );
    }
    if let Some(ch) = &report.chart {
        out += &format!(
            "  dim H1 {}, dim z {}, ball radius {:.4e}, nonsingular {}, max |Theta| {:.3e}\n",
            ch.h1_dim, ch.z_dim, ch.ball_radius, ch.nonsingular, ch.momentum_max
        );
    }
    if let Some(s) = &report.samples {
        out += &format!(
            "  samples {}: kept {} ({:.3}), labels {}, contradictions {}, local dimension {:?}\n",
            s.count, s.kept, s.kept_fraction, s.labels, s.contradictions, s.local_dimension
        );
    }
    let failed = report.failed_invariants().count();
    out += &format!(
        "  invariants: {} checked, {} failed\n",
        report.invariants.len(),
        failed
    );
    for r in report.failed_invariants() {
        out += &format!(
            "    FAIL {} residual {:.3e} {} {} {:.1e}\n",
            r.name, r.residual, r.comparison, r.tolerance_name, r.tolerance
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(text: &str) -> ExperimentConfig {
        ExperimentConfig::parse(text, &[]).unwrap()
    }

    #[test]
    fn verify_u1_passes() {
        let c = config(
            "group_id = \"u1\"\ngenus = 2\nrep_strategy = \"trivial\"\nsuite_samples = 10\n",
        );
        let r = run_verify(&c);
        assert_eq!(r.status, Status::Pass, "{}", describe(&r));
        assert_eq!(r.chart.as_ref().unwrap().h1_dim, 4);
    }

    #[test]
    fn infeasible_target_is_an_error() {
        let c = config(
            "group_id = \"u1\"\ngenus = 1\nrep_strategy = \"trivial\"\ncentral_target = [0.5]\n",
        );
        let r = run_verify(&c);
        assert_eq!(r.status, Status::Error);
        assert!(r.error.unwrap().contains("infeasible"));
    }

    #[test]
    fn chart_needs_samples() {
        let c = config("group_id = \"u1\"\ngenus = 1\nrep_strategy = \"trivial\"\n");
        assert_eq!(run_chart(&c).status, Status::Error);
    }
}
