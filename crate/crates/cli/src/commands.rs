//! Sweep-table builders behind the CLI subcommands.

use crate::output::{parse_grid, Table, Value};
use mim_core::*;

/// CLI-level failure: anything here is reported as a usage error (exit 2).
pub type CmdResult<T> = std::result::Result<T, String>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Family {
    Bsc,
    Bec,
    Ksym,
}

impl Family {
    fn as_str(&self) -> &'static str {
        match self {
            Family::Bsc => "bsc",
            Family::Bec => "bec",
            Family::Ksym => "ksym",
        }
    }
}

fn importance(varpi: f64) -> CmdResult<ImportanceParam> {
    ImportanceParam::new(varpi).map_err(|e| e.to_string())
}

/// Resolves a scalar flag and its `start:stop:step` variant into sweep values.
fn sweep_values(name: &str, scalar: Option<f64>, grid: Option<&str>) -> CmdResult<Vec<f64>> {
    match (scalar, grid) {
        (_, Some(g)) => parse_grid(g),
        (Some(v), None) => Ok(vec![v]),
        (None, None) => Err(format!("provide --{name} or --{name}-grid")),
    }
}

pub struct MilcParams {
    pub family: Family,
    pub varpi: Option<f64>,
    pub varpi_grid: Option<String>,
    pub beta: Option<f64>,
    pub beta_grid: Option<String>,
    pub k: Option<usize>,
    pub numeric: bool,
    pub opts: OptimizerOptions,
}

pub fn cmd_milc(p: &MilcParams) -> CmdResult<Table> {
    let varpis = sweep_values("varpi", p.varpi, p.varpi_grid.as_deref())?;
    let betas = sweep_values("beta", p.beta, p.beta_grid.as_deref())?;
    if varpis.len() > 1 && betas.len() > 1 {
        return Err("sweep either varpi or beta, not both".into());
    }
    let k = match (p.family, p.k) {
        (Family::Ksym, Some(k)) => k,
        (Family::Ksym, None) => return Err("--k is required for the ksym family".into()),
        (_, _) => 2,
    };

    let mut columns = vec!["family", "varpi", "beta"];
    if p.family == Family::Ksym {
        columns.push("k");
    }
    columns.push("capacity");
    if p.numeric {
        columns.push("capacity_numeric");
    }
    let mut table = Table::new(&columns);

    if p.numeric && p.family == Family::Ksym && k >= 3 && betas.iter().any(|&b| b > 0.3) {
        eprintln!(
            "warning: for k >= 3 at larger beta the closed form prices the backward-fixed \
             family while the numeric column maximizes over inputs of the fixed forward \
             channel; the two can legitimately differ there"
        );
    }

    let points: Vec<(f64, f64)> = varpis
        .iter()
        .flat_map(|&v| betas.iter().map(move |&b| (v, b)))
        .collect();
    let opts = p.opts;
    let rows: Vec<CmdResult<Vec<Value>>> = exec::map_collect(points.len(), |i| {
        let (varpi, beta) = points[i];
        let w = importance(varpi)?;
        let closed = match p.family {
            Family::Bsc => milc_binary_symmetric(w, beta),
            Family::Bec => milc_binary_erasure(w, beta),
            Family::Ksym => milc_strongly_symmetric(w, beta, k),
        }
        .map_err(|e| e.to_string())?;
        let mut row = vec![
            Value::text(p.family.as_str()),
            Value::Num(varpi),
            Value::Num(beta),
        ];
        if p.family == Family::Ksym {
            row.push(Value::Int(k as i64));
        }
        row.push(Value::Num(closed.capacity));
        if p.numeric {
            let ch = match p.family {
                Family::Bsc => Channel::binary_symmetric(beta),
                Family::Bec => Channel::binary_erasure(beta),
                Family::Ksym => Channel::k_symmetric(k, beta),
            }
            .map_err(|e| e.to_string())?;
            let numeric = milc_numeric(&ch, w, &opts).map_err(|e| e.to_string())?;
            if !numeric.converged {
                eprintln!(
                    "warning: numeric capacity at varpi={varpi}, beta={beta} stopped before tolerance"
                );
            }
            row.push(Value::Num(numeric.capacity));
        }
        Ok(row)
    });
    for row in rows {
        table.push(row?);
    }
    Ok(table)
}

pub struct MidfParams {
    pub p: f64,
    pub varpi: Option<f64>,
    pub varpi_grid: Option<String>,
    pub d: Option<f64>,
    pub d_grid: Option<String>,
    pub numeric: bool,
    pub shannon: bool,
    pub opts: OptimizerOptions,
}

pub fn cmd_midf(p: &MidfParams) -> CmdResult<Table> {
    let varpis = sweep_values("varpi", p.varpi, p.varpi_grid.as_deref())?;
    let ds = sweep_values("d", p.d, p.d_grid.as_deref())?;
    if varpis.len() > 1 && ds.len() > 1 {
        return Err("sweep either varpi or d, not both".into());
    }
    if !(p.p > 0.0 && p.p < 1.0) {
        return Err(format!("--p {} must lie strictly inside (0, 1)", p.p));
    }

    let mut columns = vec![
        "p", "varpi", "d", "feasible", "rate", "alpha_star", "q00", "q01", "q10", "q11",
    ];
    if p.numeric {
        columns.push("rate_numeric");
    }
    if p.shannon {
        columns.push("shannon_rate");
    }
    let mut table = Table::new(&columns);

    let points: Vec<(f64, f64)> = varpis
        .iter()
        .flat_map(|&v| ds.iter().map(move |&d| (v, d)))
        .collect();
    let dmax = p.p.min(1.0 - p.p);
    let opts = p.opts;
    let source = Distribution::bernoulli(p.p).map_err(|e| e.to_string())?;
    let hamming = DistortionSpec::hamming(2);

    let mut any_bound_violation = false;
    let rows: Vec<CmdResult<(Vec<Value>, bool)>> = exec::map_collect(points.len(), |i| {
        let (varpi, d) = points[i];
        let w = importance(varpi)?;
        let mut row = vec![Value::Num(p.p), Value::Num(varpi), Value::Num(d)];
        if d < 0.0 || d > dmax + 1e-12 {
            row.push(Value::text("false"));
            row.extend(std::iter::repeat_n(Value::Null, 6));
            if p.numeric {
                row.push(Value::Null);
            }
            if p.shannon {
                row.push(Value::Null);
            }
            return Ok((row, false));
        }
        let rd = midf_bernoulli_hamming(p.p, w, d).map_err(|e| e.to_string())?;
        row.push(Value::text("true"));
        row.push(Value::Num(rd.rate));
        let ch = &rd.argmin_channel;
        row.push(Value::Num(ch.get(0, 1)));
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            row.push(Value::Num(ch.get(i, j)));
        }
        if p.numeric {
            let numeric = midf_numeric(&source, &hamming, d, w, &opts).map_err(|e| e.to_string())?;
            row.push(Value::Num(numeric.rate));
        }
        if p.shannon {
            let shannon = if d < dmax {
                (binary_entropy(p.p) - binary_entropy(d)).max(0.0)
            } else {
                0.0
            };
            row.push(Value::Num(shannon));
        }
        Ok((row, !rd.varpi_bound_ok))
    });
    for row in rows {
        let (row, violated) = row?;
        any_bound_violation |= violated;
        table.push(row);
    }
    if any_bound_violation {
        eprintln!(
            "warning: varpi exceeds 2*min p(y)/max p(x) on some returned channels; \
             loss interpretation is outside its guaranteed regime there"
        );
    }
    Ok(table)
}

pub struct MaxrateParams {
    pub family: Family,
    pub varpi: f64,
    pub beta: f64,
    pub eps: Option<f64>,
    pub eps_grid: Option<String>,
    pub numeric: bool,
    pub opts: OptimizerOptions,
}

pub fn cmd_maxrate(p: &MaxrateParams) -> CmdResult<Table> {
    if p.family == Family::Ksym {
        return Err("maxrate supports the bsc and bec families".into());
    }
    let epss = sweep_values("eps", p.eps, p.eps_grid.as_deref())?;
    let w = importance(p.varpi)?;

    let mut columns = vec!["family", "varpi", "beta", "eps", "rate", "regime", "p_star", "p_approx"];
    if p.numeric {
        columns.push("rate_numeric");
    }
    let mut table = Table::new(&columns);
    let opts = p.opts;

    let rows: Vec<CmdResult<Vec<Value>>> = exec::map_collect(epss.len(), |i| {
        let eps = epss[i];
        let got = match p.family {
            Family::Bsc => max_rate_bsc(w, p.beta, eps),
            Family::Bec => max_rate_bec(w, p.beta, eps),
            Family::Ksym => unreachable!(),
        }
        .map_err(|e| e.to_string())?;
        let mut row = vec![
            Value::text(p.family.as_str()),
            Value::Num(p.varpi),
            Value::Num(p.beta),
            Value::Num(eps),
            Value::Num(got.rate),
            Value::text(match got.regime {
                Regime::CapacityPlateau => "capacity_plateau",
                Regime::LossLimited => "loss_limited",
            }),
            Value::Num(got.optimal_p),
            got.p_approx.map_or(Value::Null, Value::Num),
        ];
        if p.numeric {
            let ch = match p.family {
                Family::Bsc => Channel::binary_symmetric(p.beta),
                Family::Bec => Channel::binary_erasure(p.beta),
                Family::Ksym => unreachable!(),
            }
            .map_err(|e| e.to_string())?;
            let numeric = max_rate_numeric(&ch, w, eps, &opts).map_err(|e| e.to_string())?;
            row.push(Value::Num(numeric.rate));
        }
        Ok(row)
    });
    for row in rows {
        table.push(row?);
    }
    Ok(table)
}

pub struct MimParams {
    pub dist: String,
    pub varpi: Option<f64>,
    pub varpi_grid: Option<String>,
}

pub fn cmd_mim(p: &MimParams) -> CmdResult<Table> {
    let probs: Vec<f64> = p
        .dist
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| format!("bad probability '{s}'")))
        .collect::<CmdResult<_>>()?;
    let d = Distribution::new(probs).map_err(|e| e.to_string())?;
    let varpis = sweep_values("varpi", p.varpi, p.varpi_grid.as_deref())?;

    let mut table = Table::new(&["varpi", "mim"]);
    let mut region_warned = false;
    for &varpi in &varpis {
        let w = importance(varpi)?;
        if !w.region_one(&d) && !region_warned {
            eprintln!(
                "warning: varpi {varpi} exceeds 2/max p; the measure is no longer \
                 entropy-like (uniform-maximal) for this distribution"
            );
            region_warned = true;
        }
        table.push(vec![Value::Num(varpi), Value::Num(mim(&d, w))]);
    }
    Ok(table)
}
