//! Subcommand implementations.

use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write;

use anyhow::{Context, Result};
use qwalk::walk::Marginal;
use qwalk::{
    closed_form_state, evolve_noisy_from, evolve_pure, position_marginal, shannon_entropy,
    total_quantumness, transport_point, transport_report, ChannelKind, ClassicalMode,
    CoinOperator64, CoinState64, Error, JointState64, NoisyWalk, PureWalkState64, SinkChannel,
    Topology64, TransportPoint, TransportSetup,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::params::{grid, usage, Axis, CoinArg, Params};
use crate::table::{fmt_num, Cell, Format, Table};

/// A numeric check that did not hold. Exits with status 1.
#[derive(Debug)]
pub struct CheckFailure(pub String);

impl std::fmt::Display for CheckFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CheckFailure {}

pub struct Output {
    pub format: Format,
    pub threads: Option<usize>,
}

fn base_meta(command: &str) -> Vec<(String, String)> {
    vec![
        ("tool".to_string(), "qwalk".to_string()),
        ("version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ("command".to_string(), command.to_string()),
    ]
}

fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return usage("--threads must be at least 1");
        }
        b = b.num_threads(n);
    }
    Ok(b.build()?)
}

/// Evaluates `f` at every grid point in parallel; rows keep grid order.
fn sweep_rows<F>(
    base: &Params,
    axes: &[Axis],
    threads: Option<usize>,
    f: F,
) -> Result<Vec<Vec<Cell>>>
where
    F: Fn(&Params) -> Result<Vec<Vec<Cell>>> + Sync,
{
    let points = grid(axes);
    let mut resolved = Vec::with_capacity(points.len());
    for point in &points {
        let mut p = base.clone();
        for (axis, &v) in axes.iter().zip(point) {
            p.apply(&axis.name, v)?;
        }
        resolved.push(p);
    }
    let results: Vec<Result<Vec<Vec<Cell>>>> =
        pool(threads)?.install(|| resolved.par_iter().map(|p| f(p)).collect());
    let mut rows = Vec::new();
    for (point, r) in points.iter().zip(results) {
        let axis_cells: Vec<Cell> = point.iter().map(|&v| Cell::Num(v)).collect();
        for row in r? {
            rows.push(axis_cells.iter().cloned().chain(row).collect());
        }
    }
    Ok(rows)
}

/// Walker state after `p.tau` steps.
fn walker_marginal(p: &Params) -> Result<Marginal<f64>> {
    let coin = p.coin.operator()?;
    let init = p.coin_state();
    let noise = p.noise()?;
    match p.loop_spec()? {
        None if p.channel == ChannelKind::Identity => {
            let s = evolve_pure(&coin, &init, &Topology64::line(p.tau.max(1)), p.tau)?;
            Ok(position_marginal(&s))
        }
        None => {
            let s = evolve_noisy_from(&coin, &init, &noise, &p.topology()?, 0, p.tau, None)?;
            Ok(position_marginal(&s))
        }
        Some(spec) => {
            let start = p.looped.map(|l| l.start).unwrap_or(1) as i64;
            let s = evolve_noisy_from(
                &coin,
                &init,
                &noise,
                &Topology64::Loop(spec),
                start,
                p.tau,
                Some(SinkChannel::new(spec)),
            )?;
            Ok(position_marginal(&s))
        }
    }
}

fn diagnostics(divergent: &[i64]) -> Cell {
    if divergent.is_empty() {
        Cell::Text(String::new())
    } else {
        let xs: Vec<String> = divergent.iter().map(i64::to_string).collect();
        Cell::Text(format!("divergent_support={}", xs.join(";")))
    }
}

fn distribution_text(m: &Marginal<f64>) -> String {
    m.distribution
        .iter()
        .map(|(x, p)| format!("{x}:{}", fmt_num(p)))
        .collect::<Vec<_>>()
        .join(" ")
}

pub struct EvolveArgs {
    pub params: Params,
    pub record_every: usize,
    pub full_distribution: bool,
}

pub fn evolve(args: EvolveArgs, out: &Output, w: &mut dyn Write) -> Result<()> {
    let p = &args.params;
    if args.record_every == 0 {
        return usage("--record-every must be at least 1");
    }
    let coin = p.coin.operator()?;
    let init = p.coin_state();
    let mut columns = vec!["tau", "mean", "variance", "shannon_entropy"];
    if args.full_distribution {
        columns.push("distribution");
    }
    let mut table = Table::new(columns.into_iter().map(String::from).collect());
    let mut record = |t: usize, m: Marginal<f64>| {
        if t % args.record_every == 0 || t == p.tau {
            let (mean, var) = m.distribution.mean_variance();
            let mut row = vec![
                Cell::Int(t as i64),
                Cell::Num(mean),
                Cell::Num(var),
                Cell::Num(shannon_entropy(&m.distribution)),
            ];
            if args.full_distribution {
                row.push(Cell::Text(distribution_text(&m)));
            }
            table.rows.push(row);
        }
    };
    if p.looped.is_none() && p.channel == ChannelKind::Identity {
        let mut s = PureWalkState64::at_origin(&init)?;
        for t in 1..=p.tau {
            s.step(&coin);
            record(t, position_marginal(&s));
        }
    } else {
        let topology = p.topology()?;
        let spec = p.loop_spec()?;
        let start = p.looped.map(|l| l.start as i64).unwrap_or(0);
        let walk = NoisyWalk::new(&coin, &p.noise()?, spec.map(SinkChannel::new))?;
        let mut s = JointState64::initial(&init, topology, start)?;
        for t in 1..=p.tau {
            walk.step(&mut s)?;
            record(t, position_marginal(&s));
        }
    }
    let mut meta = base_meta("evolve");
    meta.extend(p.metadata());
    meta.push(("record_every".into(), args.record_every.to_string()));
    meta.push(("format".into(), out.format.name().into()));
    table.write(&meta, out.format, w)
}

pub fn quantumness(params: Params, axes: Vec<Axis>, out: &Output, w: &mut dyn Write) -> Result<()> {
    let mut columns: Vec<String> = axes.iter().map(|a| a.name.clone()).collect();
    columns.extend(
        [
            "Q",
            "C",
            "total_Q",
            "p_plus_star",
            "upper_bound_half",
            "variance",
            "mean",
            "diagnostics",
        ]
        .map(String::from),
    );
    let rows = sweep_rows(&params, &axes, out.threads, |p| {
        let m = walker_marginal(p)?;
        let r = total_quantumness(&m, &p.family()?, p.tau)?;
        Ok(vec![vec![
            Cell::Num(r.q_value),
            Cell::Num(r.coherence),
            Cell::Num(r.total),
            Cell::Num(r.p_plus_star),
            Cell::Num(r.upper_bound_half),
            Cell::Num(r.variance),
            Cell::Num(r.mean),
            diagnostics(&r.divergent_support),
        ]])
    })
    .map_err(check_failure)?;
    let mut table = Table::new(columns);
    table.rows = rows;
    let mut meta = base_meta("quantumness");
    meta.extend(params.metadata());
    meta.push(("sweep".into(), axes_text(&axes)));
    meta.push(("classical_mode".into(), "optimal".into()));
    meta.push(("format".into(), out.format.name().into()));
    table.write(&meta, out.format, w)
}

fn axes_text(axes: &[Axis]) -> String {
    if axes.is_empty() {
        "none".into()
    } else {
        axes.iter()
            .map(Axis::to_string)
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Identity violations are check failures rather than usage errors.
fn check_failure(e: anyhow::Error) -> anyhow::Error {
    match e.downcast_ref::<Error>() {
        Some(Error::IdentityViolation { .. }) => CheckFailure(e.to_string()).into(),
        _ => e,
    }
}

pub fn transport(
    params: Params,
    axes: Vec<Axis>,
    mode: ClassicalMode<f64>,
    record_every: Option<usize>,
    out: &Output,
    w: &mut dyn Write,
) -> Result<()> {
    if params.looped.is_none() {
        return usage("transport needs --loop");
    }
    if record_every == Some(0) {
        return usage("--record-every must be at least 1");
    }
    let tau_axis = axes.iter().any(|a| a.name == "tau");
    let mut columns: Vec<String> = axes.iter().map(|a| a.name.clone()).collect();
    if !tau_axis {
        columns.push("tau".into());
    }
    columns.extend(
        [
            "eta_qw",
            "eta_rw",
            "deviation",
            "u",
            "Q",
            "total_Q",
            "classical_mode",
            "classical_p_plus",
            "diagnostics",
        ]
        .map(String::from),
    );
    let mode_text = match mode {
        ClassicalMode::Optimal => "optimal".to_string(),
        ClassicalMode::Fixed(p) => format!("fixed:{}", fmt_num(p)),
    };
    let row = |pt: &TransportPoint<f64>| {
        let mut r = Vec::new();
        if !tau_axis {
            r.push(Cell::Int(pt.tau as i64));
        }
        r.extend([
            Cell::Num(pt.eta_qw),
            Cell::Num(pt.eta_rw),
            Cell::Num(pt.deviation),
            Cell::Num(pt.u_bound),
            Cell::Num(pt.q_value),
            Cell::Num(pt.total_q),
            Cell::Text(mode_text.clone()),
            Cell::Num(pt.classical_p_plus),
            diagnostics(&pt.divergent_support),
        ]);
        r
    };
    let rows = sweep_rows(&params, &axes, out.threads, |p| {
        if p.tau == 0 {
            return usage("transport needs tau >= 1");
        }
        let l = p.looped.expect("checked above");
        let setup = TransportSetup::new(
            p.coin.operator()?,
            p.coin_state(),
            p.loop_spec()?.expect("loop"),
            p.noise()?,
        )
        .with_start(l.start);
        Ok(match record_every {
            Some(k) => transport_report(&setup, p.tau, mode, k)?
                .points
                .iter()
                .map(row)
                .collect(),
            None => vec![row(&transport_point(&setup, p.tau, mode)?)],
        })
    })
    .map_err(check_failure)?;
    let mut table = Table::new(columns);
    table.rows = rows;
    let mut meta = base_meta("transport");
    meta.extend(params.metadata());
    meta.push(("sweep".into(), axes_text(&axes)));
    meta.push(("classical_mode".into(), mode_text.clone()));
    meta.push((
        "record_every".into(),
        record_every
            .map(|k| k.to_string())
            .unwrap_or_else(|| "final".into()),
    ));
    meta.push(("format".into(), out.format.name().into()));
    table.write(&meta, out.format, w)
}

pub struct OracleArgs {
    pub coins: Vec<CoinArg>,
    pub init: (f64, f64),
    pub max_tau: usize,
    pub random_coins: usize,
    pub seed: u64,
}

/// Largest closed-form vs engine deviation allowed per amplitude.
pub const ORACLE_TOLERANCE: f64 = 1e-10;

struct Worst {
    deviation: f64,
    tau: usize,
    x: i64,
}

fn compare(coin: &CoinOperator64, init: &CoinState64, max_tau: usize) -> Result<Worst> {
    let mut worst = Worst {
        deviation: 0.0,
        tau: 0,
        x: 0,
    };
    for tau in 0..=max_tau {
        let a = closed_form_state(coin, init, tau)?;
        let b = evolve_pure(coin, init, &Topology64::line(tau.max(1)), tau)?;
        for (i, x) in a.positions().into_iter().enumerate() {
            let d = (a.psi_plus()[i] - b.psi_plus()[i])
                .norm()
                .max((a.psi_minus()[i] - b.psi_minus()[i]).norm());
            if d > worst.deviation || d.is_nan() {
                worst = Worst {
                    deviation: d,
                    tau,
                    x,
                };
            }
        }
    }
    Ok(worst)
}

pub fn oracle_check(args: OracleArgs, w: &mut dyn Write) -> Result<()> {
    let mut cases: Vec<(String, CoinOperator64, CoinState64)> = Vec::new();
    let init = CoinState64::Pure {
        eta: args.init.0,
        gamma: args.init.1,
    };
    let mut coins = args.coins.clone();
    if coins.is_empty() && args.random_coins == 0 {
        coins.push(CoinArg::Hadamard);
    }
    for c in &coins {
        cases.push((c.to_string(), c.operator()?, init.clone()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    for _ in 0..args.random_coins {
        let (a, b) = (rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..2.0 * PI));
        // |sin|, |cos| > 0.1 keeps every coin entry away from zero.
        let t = rng.gen_range(0.1002..1.4706);
        let (eta, gamma) = (rng.gen_range(0.0..FRAC_PI_2), rng.gen_range(0.0..2.0 * PI));
        let arg = CoinArg::Param {
            alpha: a,
            beta: b,
            theta: t,
        };
        cases.push((
            format!("{arg} init={};{}", fmt_num(eta), fmt_num(gamma)),
            arg.operator()?,
            CoinState64::Pure { eta, gamma },
        ));
    }
    writeln!(w, "# tool=qwalk")?;
    writeln!(w, "# version={}", env!("CARGO_PKG_VERSION"))?;
    writeln!(w, "# command=oracle-check")?;
    writeln!(w, "# max_tau={}", args.max_tau)?;
    writeln!(w, "# random_coins={}", args.random_coins)?;
    writeln!(w, "# seed={}", args.seed)?;
    writeln!(w, "# tolerance={}", fmt_num(ORACLE_TOLERANCE))?;
    let mut overall: Option<(f64, String, usize, i64)> = None;
    let mut checked = 0;
    for (name, coin, init) in &cases {
        match compare(coin, init, args.max_tau) {
            Ok(worst) => {
                checked += 1;
                let ok = worst.deviation < ORACLE_TOLERANCE;
                writeln!(
                    w,
                    "coin={name} max_deviation={} worst_tau={} worst_x={} status={}",
                    fmt_num(worst.deviation),
                    worst.tau,
                    worst.x,
                    if ok { "ok" } else { "FAIL" }
                )?;
                if overall
                    .as_ref()
                    .is_none_or(|o| worst.deviation > o.0 || worst.deviation.is_nan())
                {
                    overall = Some((worst.deviation, name.clone(), worst.tau, worst.x));
                }
            }
            Err(e) => match e.downcast_ref::<Error>() {
                Some(err @ Error::SingularCoin { .. }) => {
                    writeln!(w, "coin={name} skipped: {err}")?
                }
                _ => return Err(e).with_context(|| format!("coin {name}")),
            },
        }
    }
    match overall {
        Some((dev, name, tau, x)) => {
            writeln!(
                w,
                "summary checked={checked} max_deviation={}",
                fmt_num(dev)
            )?;
            if !(dev < ORACLE_TOLERANCE) {
                return Err(CheckFailure(format!(
                    "closed form deviates by {} at coin={name} tau={tau} x={x}",
                    fmt_num(dev)
                ))
                .into());
            }
        }
        None => writeln!(w, "summary checked=0")?,
    }
    Ok(())
}
