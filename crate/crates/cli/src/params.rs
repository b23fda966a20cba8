//! Flag grammar: coins, initial states, sweeps and resolved walk parameters.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt;

use qwalk::{
    ChannelKind, ClassicalFamily64, ClassicalMode, CoinOperator64, CoinState64, LoopSpec64,
    NoiseChannel64, Topology64,
};

use crate::table::fmt_num;

/// A usage error: bad flag values. Exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage<T>(msg: impl Into<String>) -> anyhow::Result<T> {
    Err(UsageError(msg.into()).into())
}

fn number(flag: &str, s: &str) -> anyhow::Result<f64> {
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => usage(format!("--{flag}: `{s}` is not a finite number")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoinArg {
    Hadamard,
    Identity,
    PauliZ,
    Param { alpha: f64, beta: f64, theta: f64 },
}

impl CoinArg {
    pub fn parse(s: &str) -> anyhow::Result<Self> {
        match s.trim() {
            "hadamard" => Ok(CoinArg::Hadamard),
            "identity" => Ok(CoinArg::Identity),
            "pauli-z" => Ok(CoinArg::PauliZ),
            other => {
                let Some(rest) = other.strip_prefix("param:") else {
                    return usage(format!("--coin: expected hadamard, identity, pauli-z or param:a,b,t, got `{other}`"));
                };
                let v: Vec<&str> = rest.split(',').collect();
                if v.len() != 3 {
                    return usage(format!(
                        "--coin: param needs three values alpha,beta,theta, got `{rest}`"
                    ));
                }
                Ok(CoinArg::Param {
                    alpha: number("coin", v[0])?,
                    beta: number("coin", v[1])?,
                    theta: number("coin", v[2])?,
                })
            }
        }
    }

    /// `(alpha, beta, theta)` when the coin belongs to the parameterized family.
    fn angles(&self) -> Option<(f64, f64, f64)> {
        match *self {
            CoinArg::Hadamard => Some((0.0, 0.0, FRAC_PI_4)),
            CoinArg::PauliZ => Some((0.0, 0.0, 0.0)),
            CoinArg::Identity => None,
            CoinArg::Param { alpha, beta, theta } => Some((alpha, beta, theta)),
        }
    }

    pub fn operator(&self) -> anyhow::Result<CoinOperator64> {
        Ok(match *self {
            CoinArg::Hadamard => CoinOperator64::hadamard(),
            CoinArg::Identity => CoinOperator64::identity(),
            CoinArg::PauliZ => CoinOperator64::pauli_z(),
            CoinArg::Param { alpha, beta, theta } => {
                CoinOperator64::parameterized(alpha, beta, theta)?
            }
        })
    }
}

impl fmt::Display for CoinArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            CoinArg::Hadamard => f.write_str("hadamard"),
            CoinArg::Identity => f.write_str("identity"),
            CoinArg::PauliZ => f.write_str("pauli-z"),
            CoinArg::Param { alpha, beta, theta } => {
                write!(
                    f,
                    "param:{},{},{}",
                    fmt_num(alpha),
                    fmt_num(beta),
                    fmt_num(theta)
                )
            }
        }
    }
}

/// `"<eta>;<gamma>"`, where `eta` may be `+` (0) or `-` (pi/2) and `gamma`
/// defaults to 0.
pub fn parse_init(s: &str) -> anyhow::Result<(f64, f64)> {
    let mut parts = s.split(';');
    let eta = match parts.next().map(str::trim) {
        Some("+") => 0.0,
        Some("-") => FRAC_PI_2,
        Some(v) => number("init", v)?,
        None => 0.0,
    };
    let gamma = match parts.next() {
        Some(v) => number("init", v)?,
        None => 0.0,
    };
    if parts.next().is_some() {
        return usage(format!("--init: expected \"eta;gamma\", got `{s}`"));
    }
    Ok((eta, gamma))
}

pub fn parse_mode(s: &str) -> anyhow::Result<ClassicalMode<f64>> {
    match s.trim() {
        "optimal" => Ok(ClassicalMode::Optimal),
        other => match other.strip_prefix("fixed:") {
            Some(p) => {
                let p = number("classical-mode", p)?;
                if !(0.0..=1.0).contains(&p) {
                    return usage(format!("--classical-mode: bias {p} outside [0, 1]"));
                }
                Ok(ClassicalMode::Fixed(p))
            }
            None => usage(format!(
                "--classical-mode: expected optimal or fixed:<p>, got `{other}`"
            )),
        },
    }
}

pub const AXES: [&str; 8] = ["q", "tau", "eta", "gamma", "alpha", "beta", "theta", "r"];

/// One linear sweep axis, endpoints included.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Axis {
    pub fn parse(s: &str) -> anyhow::Result<Self> {
        let v: Vec<&str> = s.split(':').collect();
        if v.len() != 4 {
            return usage(format!(
                "--sweep: expected name:start:stop:count, got `{s}`"
            ));
        }
        let name = v[0].trim().to_string();
        if !AXES.contains(&name.as_str()) {
            return usage(format!(
                "--sweep: unknown axis `{name}` (one of {})",
                AXES.join(", ")
            ));
        }
        let count: usize = match v[3].trim().parse() {
            Ok(c) if c >= 2 => c,
            _ => {
                return usage(format!(
                    "--sweep: count must be an integer >= 2, got `{}`",
                    v[3]
                ))
            }
        };
        Ok(Axis {
            name,
            start: number("sweep", v[1])?,
            stop: number("sweep", v[2])?,
            count,
        })
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            self.stop
        } else {
            self.start + (self.stop - self.start) * i as f64 / (self.count - 1) as f64
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}:{}:{}",
            self.name,
            fmt_num(self.start),
            fmt_num(self.stop),
            self.count
        )
    }
}

/// Every grid point of the axes, first axis outermost. No axes gives one
/// empty point.
pub fn grid(axes: &[Axis]) -> Vec<Vec<f64>> {
    let mut points = vec![Vec::new()];
    for axis in axes {
        points = points
            .into_iter()
            .flat_map(|p| {
                (0..axis.count).map(move |i| {
                    let mut q = p.clone();
                    q.push(axis.value(i));
                    q
                })
            })
            .collect();
    }
    points
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopArgs {
    pub n: usize,
    pub sink_site: usize,
    pub leak: f64,
    pub start: usize,
}

/// Fully resolved parameters of one walk.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    pub coin: CoinArg,
    pub eta: f64,
    pub gamma: f64,
    pub channel: ChannelKind,
    pub channel_param: Option<f64>,
    pub tau: usize,
    pub looped: Option<LoopArgs>,
}

impl Params {
    /// Sets the parameter named by a sweep axis.
    pub fn apply(&mut self, axis: &str, v: f64) -> anyhow::Result<()> {
        match axis {
            "q" => self.channel_param = Some(v),
            "tau" => {
                if v < 0.0 || (v - v.round()).abs() > 1e-9 {
                    return usage(format!(
                        "--sweep: tau values must be non-negative integers, got {v}"
                    ));
                }
                self.tau = v.round() as usize;
            }
            "eta" => self.eta = v,
            "gamma" => self.gamma = v,
            "alpha" | "beta" | "theta" => {
                let Some((mut a, mut b, mut t)) = self.coin.angles() else {
                    return usage(format!(
                        "--sweep: axis {axis} needs a parameterized coin, not {}",
                        self.coin
                    ));
                };
                match axis {
                    "alpha" => a = v,
                    "beta" => b = v,
                    _ => t = v,
                }
                self.coin = CoinArg::Param {
                    alpha: a,
                    beta: b,
                    theta: t,
                };
            }
            "r" => match self.looped.as_mut() {
                Some(l) => l.leak = v,
                None => return usage("--sweep: axis r needs --loop"),
            },
            other => return usage(format!("--sweep: unknown axis `{other}`")),
        }
        Ok(())
    }

    pub fn coin_state(&self) -> CoinState64 {
        CoinState64::Pure {
            eta: self.eta,
            gamma: self.gamma,
        }
    }

    pub fn noise(&self) -> anyhow::Result<NoiseChannel64> {
        let param = match (self.channel, self.channel_param) {
            (ChannelKind::Identity, p) => p.unwrap_or(0.0),
            (_, Some(p)) => p,
            (kind, None) => {
                return usage(format!("--channel-param is required for channel {kind}"))
            }
        };
        Ok(NoiseChannel64::builtin(self.channel, param)?)
    }

    pub fn loop_spec(&self) -> anyhow::Result<Option<LoopSpec64>> {
        self.looped
            .map(|l| LoopSpec64::new(l.n, l.sink_site, l.leak))
            .transpose()
            .map_err(Into::into)
    }

    /// Topology sized for `tau` steps.
    pub fn topology(&self) -> anyhow::Result<Topology64> {
        Ok(match self.loop_spec()? {
            Some(spec) => Topology64::Loop(spec),
            None => Topology64::line(self.tau.max(1)),
        })
    }

    pub fn family(&self) -> anyhow::Result<ClassicalFamily64> {
        Ok(match (self.loop_spec()?, self.looped) {
            (Some(spec), Some(l)) => ClassicalFamily64::Loop {
                spec,
                start: l.start,
            },
            _ => ClassicalFamily64::Line,
        })
    }

    /// `key=value` pairs describing these parameters.
    pub fn metadata(&self) -> Vec<(String, String)> {
        let mut m = vec![
            ("coin".to_string(), self.coin.to_string()),
            ("init_eta".to_string(), fmt_num(self.eta)),
            ("init_gamma".to_string(), fmt_num(self.gamma)),
            ("channel".to_string(), self.channel.to_string()),
            (
                "channel_param".to_string(),
                self.channel_param
                    .map(fmt_num)
                    .unwrap_or_else(|| "none".into()),
            ),
            ("tau".to_string(), self.tau.to_string()),
        ];
        match self.looped {
            Some(l) => m.extend([
                ("topology".to_string(), "loop".to_string()),
                ("loop_n".to_string(), l.n.to_string()),
                ("sink_site".to_string(), l.sink_site.to_string()),
                ("sink_r".to_string(), fmt_num(l.leak)),
                ("start_site".to_string(), l.start.to_string()),
            ]),
            None => m.push(("topology".to_string(), "line".to_string())),
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coin_grammar() {
        assert_eq!(CoinArg::parse("hadamard").unwrap(), CoinArg::Hadamard);
        assert_eq!(
            CoinArg::parse("param:0,0,1").unwrap(),
            CoinArg::Param {
                alpha: 0.0,
                beta: 0.0,
                theta: 1.0
            }
        );
        assert!(CoinArg::parse("param:0,1").is_err());
        assert!(CoinArg::parse("grover").is_err());
        assert_eq!(
            CoinArg::parse("param:0.5,-1,1").unwrap().to_string(),
            "param:0.5,-1,1"
        );
    }

    #[test]
    fn init_grammar() {
        assert_eq!(parse_init("+;0").unwrap(), (0.0, 0.0));
        assert_eq!(parse_init("-").unwrap(), (FRAC_PI_2, 0.0));
        assert_eq!(parse_init("0.7;1.5").unwrap(), (0.7, 1.5));
        assert!(parse_init("a;b").is_err());
        assert!(parse_init("1;2;3").is_err());
    }

    #[test]
    fn sweep_grammar_and_grid() {
        let a = Axis::parse("q:0:1:101").unwrap();
        assert_eq!(a.value(0), 0.0);
        assert_eq!(a.value(100), 1.0);
        assert!((a.value(37) - 0.37).abs() < 1e-15);
        assert!(Axis::parse("q:0:1:1").is_err());
        assert!(Axis::parse("zeta:0:1:3").is_err());
        let g = grid(&[
            Axis::parse("q:0:1:2").unwrap(),
            Axis::parse("tau:1:3:3").unwrap(),
        ]);
        assert_eq!(g.len(), 6);
        assert_eq!(g[1], vec![0.0, 2.0]);
        assert_eq!(grid(&[]), vec![Vec::<f64>::new()]);
    }

    #[test]
    fn axis_application() {
        let mut p = Params {
            coin: CoinArg::Hadamard,
            eta: 0.0,
            gamma: 0.0,
            channel: ChannelKind::Identity,
            channel_param: None,
            tau: 3,
            looped: None,
        };
        p.apply("theta", 1.0).unwrap();
        assert_eq!(
            p.coin,
            CoinArg::Param {
                alpha: 0.0,
                beta: 0.0,
                theta: 1.0
            }
        );
        assert!(p.apply("tau", 2.5).is_err());
        assert!(p.apply("r", 0.5).is_err());
        p.coin = CoinArg::Identity;
        assert!(p.apply("alpha", 1.0).is_err());
    }
}
