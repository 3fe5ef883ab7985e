use std::fmt::Write;

use super::run::ExperimentResult;

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.6}"))
}

/// Plain-text summary. Timing is left out so the text is reproducible.
pub fn report_render(result: &ExperimentResult) -> String {
    let cfg = &result.config;
    let agg = &result.aggregate;
    let mut out = String::new();
    let k = cfg.protocol.k().map(|k| format!(", k={k}")).unwrap_or_default();
    let seeds: Vec<String> = cfg.seeds.iter().map(u64::to_string).collect();
    let _ = writeln!(out, "protocol    {} (n={}{k}, eps={})", cfg.protocol.id(), cfg.n, cfg.eps);
    let _ = writeln!(out, "state       {} (state seed {}, purity {:.6})", cfg.state, cfg.state_seed, result.state_purity);
    let _ = writeln!(out, "paulis      {} ({} strings)", cfg.paulis, result.set_size);
    let _ = writeln!(out, "seeds       {} (x{} trials)", seeds.join(", "), cfg.trials);
    let _ = writeln!(out, "budget      {} rounds, {:.1} copies per trial", result.rounds, agg.mean_copies);
    let _ = writeln!(
        out,
        "success     {}/{} = {:.4} ({} failed)",
        agg.successes, agg.trials, agg.success_fraction, agg.failed
    );
    let _ = writeln!(out, "max error   {} (median {})", fmt_opt(agg.max_error), fmt_opt(agg.median_max_error));
    for t in result.trials.iter().filter(|t| t.failure.is_some()) {
        let _ = writeln!(out, "failed      seed {} trial {}: {}", t.seed, t.trial, t.failure.as_deref().unwrap_or(""));
    }
    let _ = writeln!(out, "version     {}", result.tool_version);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{run_experiment, ExperimentConfig, ProtocolConfig};
    use crate::protocols::SigmaMode;

    #[test]
    fn renders_failures_and_protocol() {
        let mut cfg =
            ExperimentConfig::new(ProtocolConfig::Twocopy { sigma: Some(SigmaMode::Search { rank: 1 }) }, 1, "mixed", 0.05);
        cfg.budget.rounds = Some(5000);
        let text = report_render(&run_experiment(&cfg).unwrap());
        assert!(text.contains("twocopy"));
        assert!(text.contains("failed      seed 0 trial 0"));
        assert!(text.contains("max error   -"));
    }
}
