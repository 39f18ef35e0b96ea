//! The shipped benchmark functions.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{Discontinuities, GraphFunction};
use crate::moments::AnalyticGraph;

/// Piecewise-constant function on `[-1, 1]`: `levels[j]` on
/// `[breaks[j-1], breaks[j])` with `breaks` sorted inside the interval.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFamily {
    pub breaks: Vec<f64>,
    pub levels: Vec<f64>,
}

impl StepFamily {
    pub fn new(breaks: Vec<f64>, levels: Vec<f64>) -> Result<Self> {
        if levels.len() != breaks.len() + 1 {
            return Err(Error::InvalidParameter("step family needs one more level than breaks".into()));
        }
        if breaks.windows(2).any(|w| w[0] >= w[1]) || breaks.iter().any(|&b| !(-1.0 < b && b < 1.0)) {
            return Err(Error::InvalidParameter("step breaks must be increasing inside (-1, 1)".into()));
        }
        Ok(StepFamily { breaks, levels })
    }

    /// Three jumps of mixed sign and height, none on a dyadic grid point.
    pub fn eckhoff_like() -> Self {
        StepFamily {
            breaks: vec![-0.45, 0.15, 0.6],
            levels: vec![-0.5, 0.75, -0.25, 0.4],
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let j = self.breaks.iter().take_while(|&&b| x >= b).count();
        self.levels[j]
    }

    /// Pieces `(a, b, level)` covering `[-1, 1]`.
    pub fn pieces(&self) -> Vec<(f64, f64, f64)> {
        let mut edges = vec![-1.0];
        edges.extend(&self.breaks);
        edges.push(1.0);
        edges.windows(2).zip(&self.levels).map(|(w, &c)| (w[0], w[1], c)).collect()
    }

    pub fn total_variation(&self) -> f64 {
        self.levels.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
    }
}

/// Identifiers accepted on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Benchmark {
    Sign,
    Abs,
    Step,
    Disk1,
    Disk2,
}

impl Benchmark {
    pub const ALL: [Benchmark; 5] = [Benchmark::Sign, Benchmark::Abs, Benchmark::Step, Benchmark::Disk1, Benchmark::Disk2];

    /// Ambient dimension `p`.
    pub fn p(self) -> usize {
        match self {
            Benchmark::Sign | Benchmark::Abs | Benchmark::Step => 2,
            Benchmark::Disk1 | Benchmark::Disk2 => 3,
        }
    }

    pub fn function(self) -> GraphFunction {
        let x1 = vec![(-1.0, 1.0)];
        let x2 = vec![(-1.0, 1.0), (-1.0, 1.0)];
        match self {
            Benchmark::Sign => GraphFunction::new("sign", x1, (-1.0, 1.0), |x| if x[0] < 0.0 { -1.0 } else { 1.0 })
                .with_discontinuities(Discontinuities::Points(vec![0.0])),
            Benchmark::Abs => GraphFunction::new("abs", x1, (-1.0, 1.0), |x| x[0].abs()),
            Benchmark::Step => {
                let step = StepFamily::eckhoff_like();
                let jumps = step.breaks.clone();
                GraphFunction::new("step", x1, (-1.0, 1.0), move |x| step.eval(x[0]))
                    .with_discontinuities(Discontinuities::Points(jumps))
            }
            Benchmark::Disk1 => GraphFunction::new("disk1", x2, (-1.0, 1.0), |x| {
                if x[0] * x[0] + x[1] * x[1] <= 0.25 {
                    1.0
                } else {
                    0.0
                }
            })
            .with_discontinuities(Discontinuities::Circles(vec![(0.0, 0.0, 0.5)])),
            Benchmark::Disk2 => GraphFunction::new("disk2", x2, (-1.0, 1.0), |x| {
                let a = if x[0] * x[0] + x[1] * x[1] <= 0.25 { 1.0 } else { 0.0 };
                let b = if (x[0] + 0.5).powi(2) + (x[1] + 0.5).powi(2) <= 0.25 { 0.5 } else { 0.0 };
                a - b
            })
            .with_discontinuities(Discontinuities::Circles(vec![(0.0, 0.0, 0.5), (-0.5, -0.5, 0.5)])),
        }
    }

    /// Closed-form moments, when available.
    pub fn analytic(self) -> Option<AnalyticGraph> {
        match self {
            Benchmark::Sign => Some(AnalyticGraph::Sign),
            Benchmark::Abs => Some(AnalyticGraph::Abs),
            Benchmark::Step => Some(AnalyticGraph::Step(StepFamily::eckhoff_like())),
            Benchmark::Disk1 => Some(AnalyticGraph::Disk { radius: 0.5 }),
            Benchmark::Disk2 => None,
        }
    }

    /// Total variation for univariate benchmarks.
    pub fn total_variation(self) -> Option<f64> {
        match self {
            Benchmark::Sign => Some(2.0),
            Benchmark::Abs => Some(2.0),
            Benchmark::Step => Some(StepFamily::eckhoff_like().total_variation()),
            Benchmark::Disk1 | Benchmark::Disk2 => None,
        }
    }

    /// Lipschitz constant, for continuous benchmarks.
    pub fn lipschitz(self) -> Option<f64> {
        match self {
            Benchmark::Abs => Some(1.0),
            _ => None,
        }
    }
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Benchmark::Sign => "sign",
            Benchmark::Abs => "abs",
            Benchmark::Step => "step",
            Benchmark::Disk1 => "disk1",
            Benchmark::Disk2 => "disk2",
        })
    }
}

impl FromStr for Benchmark {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sign" => Ok(Benchmark::Sign),
            "abs" => Ok(Benchmark::Abs),
            "step" | "eckhoff65" => Ok(Benchmark::Step),
            "disk1" => Ok(Benchmark::Disk1),
            "disk2" => Ok(Benchmark::Disk2),
            other => Err(Error::InvalidParameter(format!("unknown benchmark `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_evaluation() {
        let s = StepFamily::eckhoff_like();
        assert_eq!(s.eval(-1.0), -0.5);
        assert_eq!(s.eval(-0.45), 0.75);
        assert_eq!(s.eval(0.99), 0.4);
        assert_eq!(s.pieces().len(), 4);
        assert!((s.total_variation() - (1.25 + 1.0 + 0.65)).abs() < 1e-12);
        assert!(StepFamily::new(vec![0.5, 0.1], vec![0.0, 1.0, 0.0]).is_err());
        assert!(StepFamily::new(vec![0.1], vec![0.0]).is_err());
    }

    #[test]
    fn ids_round_trip() {
        for b in Benchmark::ALL {
            assert_eq!(b.to_string().parse::<Benchmark>().unwrap(), b);
            assert_eq!(b.function().input_dim() + 1, b.p());
        }
        assert!("nope".parse::<Benchmark>().is_err());
    }

    #[test]
    fn disk2_levels() {
        let f = Benchmark::Disk2.function();
        assert_eq!(f.eval(&[0.0, 0.0]), 1.0);
        assert_eq!(f.eval(&[-0.3, -0.3]), 0.5);
        assert_eq!(f.eval(&[-0.8, -0.6]), -0.5);
        assert_eq!(f.eval(&[0.9, 0.9]), 0.0);
    }
}
