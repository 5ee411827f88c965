use std::fs;
use std::path::Path;

use super::config::parse_keyword;
use super::output::{emit, header};
use super::{Command, CommonArgs, ConfigOverlay, RunConfig};
use crate::estimator::{self, with_workers, EstimatorConfig, EstimatorResult, Simulation};
use crate::experiments::{
    fit_tail, level_map_csv, run_table, sigma_sweep, verify_exp_relation, TableId, TableRow, TailRow, DEFAULT_SIGMAS,
};
use crate::field::Dimension;
use crate::{Error, Result};

pub(super) fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Estimate(args) => estimate(&args.resolve_with(ConfigOverlay::default())?),
        Command::Table(args) => {
            let extra = ConfigOverlay {
                table: args.table.clone(),
                thresholds: args.thresholds.clone(),
                mc_max_b: args.mc_max_b,
                ..Default::default()
            };
            table(&args.common, extra)
        }
        Command::LevelMap(args) => level_map(&args.resolve_with(ConfigOverlay::default())?),
        Command::VerifyExp(args) => {
            let extra = ConfigOverlay {
                exp_mode: args.mode.as_deref().map(|s| parse_keyword("exp_mode", s)).transpose()?,
                probe: args.probe.clone(),
                levels: args.levels.clone(),
                ..Default::default()
            };
            verify_exp(&args.common.resolve_with(extra)?)
        }
        Command::SigmaSweep(args) => {
            let extra = ConfigOverlay { sigmas: args.sigmas.clone(), ..Default::default() };
            sweep(&args.common.resolve_with(extra)?)
        }
        Command::FitTail(args) => {
            let extra = ConfigOverlay { input: args.input.clone(), ..Default::default() };
            tail(&args.common.resolve_with(extra)?)
        }
    }
}

fn estimate(config: &RunConfig) -> Result<()> {
    let result = estimator::run(&config.estimator_config()?)?;
    let mut out = header("estimate", config);
    out.push_str(EstimatorResult::CSV_HEADER);
    out.push('\n');
    out.push_str(&result.csv_row(config.timing));
    out.push('\n');
    emit(config.output.as_deref(), &out)?;
    eprintln!(
        "{} b={} p_hat={:.4e} std={:.4e} rel_err={:.4} hits={} discarded={}",
        result.method, result.b, result.p_hat, result.std, result.rel_err, result.hits, result.discarded
    );
    Ok(())
}

/// Settings of a reference table as the lowest configuration layer.
fn table_overlay(id: TableId) -> ConfigOverlay {
    let c = id.config();
    ConfigOverlay {
        dim: Some(c.dim.as_usize()),
        correlation_length: Some(c.model.correlation_length),
        kernel: Some(c.model.kernel),
        nodes: Some(c.nodes_per_axis),
        force: Some(c.forcing.name().to_string()),
        force_value: match c.forcing {
            crate::Forcing::Constant(v) => Some(v),
            _ => None,
        },
        bc: Some(c.boundary),
        pivot_tol: Some(c.pivot_tol),
        thresholds: Some(id.thresholds().to_vec()),
        ..Default::default()
    }
}

fn table(common: &CommonArgs, extra: ConfigOverlay) -> Result<()> {
    let layers = common.layers(extra)?;
    let name = layers.table.clone().ok_or_else(|| Error::config("table", "no table selected"))?;
    let id: TableId = name.parse()?;
    let config = table_overlay(id).merge(layers).resolve()?;
    let thresholds = config.thresholds.clone().unwrap_or_else(|| id.thresholds().to_vec());
    let rows = run_table(&config.estimator_config()?, &thresholds, config.mc_max_b)?;
    let mut out = header("table", &config);
    out.push_str(TableRow::CSV_HEADER);
    out.push('\n');
    for r in &rows {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    emit(config.output.as_deref(), &out)
}

fn simulation(config: &RunConfig) -> Result<(EstimatorConfig, Simulation)> {
    let est = config.estimator_config()?;
    est.validate()?;
    let sim = Simulation::new(&est)?;
    Ok((est, sim))
}

fn level_map(config: &RunConfig) -> Result<()> {
    let csv = with_workers(config.workers, || {
        let (est, sim) = simulation(config)?;
        let levels = sim.level_function(est.threshold, &est.level)?;
        Ok(level_map_csv(sim.grid(), &levels))
    })?;
    let mut out = header("level-map", config);
    out.push_str(&csv);
    emit(config.output.as_deref(), &out)
}

fn verify_exp(config: &RunConfig) -> Result<()> {
    let (_, sim) = simulation(config)?;
    let probe = match &config.probe {
        Some(p) => [p[0], if config.dimension() == Dimension::Two { p[1] } else { 0.0 }],
        None => [0.5, if config.dimension() == Dimension::Two { 0.5 } else { 0.0 }],
    };
    let node = sim.grid().nearest(probe);
    let levels = config.levels.clone().unwrap_or_else(|| (2..=8).map(f64::from).collect());
    let fit = verify_exp_relation(&sim, config.exp_mode, node, &levels, config.seed)?;
    let mut out = header("verify-exp", config);
    for line in fit.summary().lines() {
        out.push_str(&format!("# {line}\n"));
    }
    out.push_str(&fit.csv());
    emit(config.output.as_deref(), &out)?;
    eprintln!("slope={:.4} kappa={:.4} alpha={:.4}", fit.slope, fit.kappa, fit.alpha);
    Ok(())
}

fn sweep(config: &RunConfig) -> Result<()> {
    let sigmas = config.sigmas.clone().unwrap_or_else(|| DEFAULT_SIGMAS.to_vec());
    let result = with_workers(config.workers, || {
        let (est, sim) = simulation(config)?;
        sigma_sweep(&sim, est.threshold, &sigmas, &est.level, est.samples, est.seed)
    })?;
    let mut out = header("sigma-sweep", config);
    out.push_str(&format!(
        "# best_sigma = {:e}\n# inverse_level_min = {:e}\n# inverse_level_max = {:e}\n",
        result.best_sigma(),
        result.inverse_level_range.0,
        result.inverse_level_range.1
    ));
    out.push_str(&result.csv());
    emit(config.output.as_deref(), &out)?;
    eprintln!(
        "best sigma {} (1/l in [{:.3}, {:.3}])",
        result.best_sigma(),
        result.inverse_level_range.0,
        result.inverse_level_range.1
    );
    Ok(())
}

/// `(b, p, rel_err)` rows from a `table` or `estimate` CSV.
pub(crate) fn read_tail_rows(path: &Path) -> Result<Vec<TailRow>> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    parse_tail_rows(&text)
}

pub(crate) fn parse_tail_rows(text: &str) -> Result<Vec<TailRow>> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let head: Vec<&str> =
        lines.next().ok_or_else(|| Error::Parse("input has no header row".into()))?.split(',').collect();
    let col = |name: &str| head.iter().position(|h| *h == name);
    let (b, p, r) = match (col("b"), col("p_is"), col("rel_err_is"), col("p_hat"), col("rel_err")) {
        (Some(b), Some(p), Some(r), _, _) => (b, p, r),
        (Some(b), _, _, Some(p), Some(r)) => (b, p, r),
        _ => return Err(Error::Parse("input needs columns b and either p_is,rel_err_is or p_hat,rel_err".into())),
    };
    lines
        .enumerate()
        .map(|(k, line)| {
            let cells: Vec<&str> = line.split(',').collect();
            let num = |i: usize| -> Result<f64> {
                cells
                    .get(i)
                    .and_then(|c| c.trim().parse::<f64>().ok())
                    .ok_or_else(|| Error::Parse(format!("row {}: column `{}` is not a number", k + 1, head[i])))
            };
            Ok(TailRow { b: num(b)?, p_hat: num(p)?, rel_err: num(r)? })
        })
        .collect()
}

fn tail(config: &RunConfig) -> Result<()> {
    let input = config.input.as_deref().ok_or_else(|| Error::config("input", "no input file given"))?;
    let fit = fit_tail(&read_tail_rows(input)?)?;
    let mut out = header("fit-tail", config);
    out.push_str(&fit.summary());
    emit(config.output.as_deref(), &out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_rows_from_table_and_estimate_csv() {
        let table = "# c\nb,p_mc,p_is,std_mc,std_is,rel_err_mc,rel_err_is,mc_zero_hits\n2e0,1e-1,1.1e-1,3e-1,2e-1,3e0,2e0,false\n";
        let rows = parse_tail_rows(table).unwrap();
        assert_eq!(rows, vec![TailRow { b: 2.0, p_hat: 0.11, rel_err: 2.0 }]);
        let est = format!("{}\nis,4e0,3e-2,7e-2,2.3e0,10,3,0,42,\n", EstimatorResult::CSV_HEADER);
        assert_eq!(parse_tail_rows(&est).unwrap()[0], TailRow { b: 4.0, p_hat: 0.03, rel_err: 2.3 });
        assert!(parse_tail_rows("x,y\n1,2\n").is_err());
        assert!(parse_tail_rows("b,p_hat,rel_err\n1,abc,2\n").is_err());
    }

    #[test]
    fn table_layer_sits_below_flags() {
        let o = table_overlay(TableId::TwoDimShortCorrelation)
            .merge(ConfigOverlay { nodes: Some(30), ..Default::default() });
        let cfg = o.resolve().unwrap();
        assert_eq!((cfg.dim, cfg.nodes, cfg.correlation_length), (2, 30, 0.2));
        let p = table_overlay(TableId::Periodic).resolve().unwrap();
        assert_eq!(p.estimator_config().unwrap(), EstimatorConfig { threshold: 4.0, ..TableId::Periodic.config() });
    }
}
