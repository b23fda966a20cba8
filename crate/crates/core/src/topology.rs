//! Walk geometries: the infinite line and a loop with an absorbing sink.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A loop of `n` sites (labelled `1..=n`) with an absorbing sink at label
/// `n + 1`, attached to `sink_site` with leak probability `leak`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopSpec<T> {
    n: usize,
    sink_site: usize,
    leak: T,
}

impl<T: Real> LoopSpec<T> {
    pub fn new(n: usize, sink_site: usize, leak: T) -> Result<Self> {
        if n < 3 {
            return Err(Error::ParameterOutOfRange {
                name: "n",
                value: n as f64,
                range: "n >= 3",
            });
        }
        if sink_site < 1 || sink_site > n {
            return Err(Error::ParameterOutOfRange {
                name: "sink_site",
                value: sink_site as f64,
                range: "1 <= k <= n",
            });
        }
        if !(leak >= T::zero() && leak <= T::one()) {
            return Err(Error::ParameterOutOfRange {
                name: "leak",
                value: leak.to_f64().unwrap_or(f64::NAN),
                range: "[0, 1]",
            });
        }
        Ok(Self { n, sink_site, leak })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sink_site(&self) -> usize {
        self.sink_site
    }

    pub fn leak(&self) -> T {
        self.leak
    }

    /// Label of the absorbing site.
    pub fn sink_label(&self) -> usize {
        self.n + 1
    }

    /// Site reached from `site` by one clockwise (`+`) or counter-clockwise
    /// (`-`) move; the sink maps to itself.
    pub fn neighbour(&self, site: usize, plus: bool) -> usize {
        let n = self.n;
        if site == n + 1 {
            site
        } else if plus {
            if site == n {
                1
            } else {
                site + 1
            }
        } else if site == 1 {
            n
        } else {
            site - 1
        }
    }

    pub fn check_site(&self, site: usize) -> Result<()> {
        if site < 1 || site > self.n {
            return Err(Error::ParameterOutOfRange {
                name: "start_site",
                value: site as f64,
                range: "1 <= site <= n",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Topology<T> {
    /// Infinite line, simulated for at most `max_steps` steps from the origin.
    Line {
        max_steps: usize,
    },
    Loop(LoopSpec<T>),
}

impl<T: Real> Topology<T> {
    pub fn line(max_steps: usize) -> Self {
        Topology::Line { max_steps }
    }

    pub fn looped(n: usize, sink_site: usize, leak: T) -> Result<Self> {
        Ok(Topology::Loop(LoopSpec::new(n, sink_site, leak)?))
    }

    pub fn as_loop(&self) -> Option<&LoopSpec<T>> {
        match self {
            Topology::Loop(l) => Some(l),
            Topology::Line { .. } => None,
        }
    }
}

/// Position basis of the walker at a given time.
///
/// On the line after `tau` steps from the origin the basis is
/// `{-tau, -tau + 2, ..., tau}` (index `i` is position `2i - tau`); on a loop it
/// is the labels `1..=n + 1` (index `i` is label `i + 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Register {
    Line { tau: usize },
    Loop { n: usize },
}

impl Register {
    pub fn len(&self) -> usize {
        match *self {
            Register::Line { tau } => tau + 1,
            Register::Loop { n } => n + 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn position(&self, i: usize) -> i64 {
        match *self {
            Register::Line { tau } => 2 * i as i64 - tau as i64,
            Register::Loop { .. } => i as i64 + 1,
        }
    }

    pub fn positions(&self) -> Vec<i64> {
        (0..self.len()).map(|i| self.position(i)).collect()
    }

    pub fn index_of(&self, x: i64) -> Option<usize> {
        match *self {
            Register::Line { tau } => {
                let shifted = x + tau as i64;
                if shifted < 0 || shifted % 2 != 0 || shifted > 2 * tau as i64 {
                    None
                } else {
                    Some((shifted / 2) as usize)
                }
            }
            Register::Loop { n } => {
                if x >= 1 && x <= n as i64 + 1 {
                    Some(x as usize - 1)
                } else {
                    None
                }
            }
        }
    }

    /// Register after one more step.
    pub fn advanced(&self) -> Register {
        match *self {
            Register::Line { tau } => Register::Line { tau: tau + 1 },
            r @ Register::Loop { .. } => r,
        }
    }

    /// Index in [`Register::advanced`] reached from index `i` with coin `coin`
    /// (0 moves `+`, 1 moves `-`).
    #[inline]
    pub fn shift_index(&self, coin: usize, i: usize) -> usize {
        match *self {
            Register::Line { .. } => {
                if coin == 0 {
                    i + 1
                } else {
                    i
                }
            }
            Register::Loop { n } => {
                let site = i + 1;
                let next = if site == n + 1 {
                    site
                } else if coin == 0 {
                    if site == n {
                        1
                    } else {
                        site + 1
                    }
                } else if site == 1 {
                    n
                } else {
                    site - 1
                };
                next - 1
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loop_validation() {
        assert!(LoopSpec::new(2, 1, 0.5).is_err());
        assert!(LoopSpec::new(5, 0, 0.5).is_err());
        assert!(LoopSpec::new(5, 6, 0.5).is_err());
        assert!(LoopSpec::new(5, 2, 1.5).is_err());
        assert!(LoopSpec::new(5, 5, 1.0).is_ok());
    }

    #[test]
    fn loop_wraps_and_sink_is_fixed() {
        let l = LoopSpec::new(3, 1, 0.0).unwrap();
        assert_eq!(l.neighbour(3, true), 1);
        assert_eq!(l.neighbour(1, false), 3);
        assert_eq!(l.neighbour(4, true), 4);
        assert_eq!(l.neighbour(4, false), 4);
        let r = Register::Loop { n: 3 };
        for i in 0..4 {
            for coin in 0..2 {
                let site = l.neighbour(i + 1, coin == 0);
                assert_eq!(r.shift_index(coin, i) + 1, site);
            }
        }
    }

    #[test]
    fn line_register_indexing() {
        let r = Register::Line { tau: 3 };
        assert_eq!(r.positions(), vec![-3, -1, 1, 3]);
        assert_eq!(r.index_of(1), Some(2));
        assert_eq!(r.index_of(0), None);
        assert_eq!(r.index_of(5), None);
        let next = r.advanced();
        assert_eq!(next.position(r.shift_index(0, 2)), 2);
        assert_eq!(next.position(r.shift_index(1, 2)), 0);
    }
}
