use std::path::Path;

use astra_core::sc::ScConfig;
use astra_core::transformer::{evaluate, AccuracyReport, ArithmeticMode, Dataset, TinyTransformer};
use astra_core::vdpe::VdpeConfig;

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::output::{num, Artifact, Table};

fn require(path: &Path) -> CliResult<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::missing_fixture(path))
    }
}

/// Candidate modes: exact, quantized, then stochastic for every generator,
/// stream length and ADC resolution (in that nesting order).
pub fn candidate_modes(cfg: &ExperimentConfig) -> Vec<ArithmeticMode> {
    let base = cfg.arch.vdpe;
    let mut modes = vec![
        ArithmeticMode::Exact,
        ArithmeticMode::Quantized {
            magnitude_bits: base.sc.magnitude_bits,
        },
    ];
    for &generator in &cfg.infer.generators {
        for &stream_length in &cfg.infer.stream_lengths {
            for &adc in &cfg.infer.adc {
                modes.push(ArithmeticMode::Stochastic(VdpeConfig {
                    sc: ScConfig {
                        stream_length,
                        generator,
                        ..base.sc
                    },
                    adc,
                    ..base
                }));
            }
        }
    }
    modes
}

pub fn infer_reports(cfg: &ExperimentConfig) -> CliResult<Vec<AccuracyReport>> {
    let inf = &cfg.infer;
    require(&inf.model)?;
    require(&inf.dataset)?;
    let model = TinyTransformer::load(&inf.model)?;
    let mut data = Dataset::load(&inf.dataset)?;
    if let Some(n) = inf.items {
        data.inputs.truncate(n);
        data.labels.truncate(n);
    }
    candidate_modes(cfg)
        .into_iter()
        .map(|mode| evaluate(&model, &data, ArithmeticMode::Exact, mode, cfg.seed).map_err(CliError::from))
        .collect()
}

pub fn infer_table(reports: &[AccuracyReport]) -> Table {
    let mut t = Table::new(
        "infer-compare",
        &[
            "reference_mode",
            "candidate_mode",
            "items",
            "reference_accuracy",
            "candidate_accuracy",
            "top1_agreement",
            "mean_relative_logit_error",
            "max_relative_logit_error",
        ],
    );
    for r in reports {
        t.push(vec![
            r.reference_mode.clone(),
            r.candidate_mode.clone(),
            r.items.to_string(),
            num(r.reference_accuracy),
            num(r.candidate_accuracy),
            num(r.top1_agreement),
            num(r.mean_relative_logit_error),
            num(r.max_relative_logit_error),
        ]);
    }
    t
}

pub fn infer_compare(cfg: &ExperimentConfig) -> CliResult<Vec<Artifact>> {
    let reports = infer_reports(cfg)?;
    Ok(vec![Artifact::csv("infer_compare.csv", &infer_table(&reports))?])
}
