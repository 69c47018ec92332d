use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::svf::Domain;

/// Direction of a one-sided limit x → x₀±.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Right,
    Left,
}

impl Side {
    /// +1 for the right side, −1 for the left.
    pub fn sign(self) -> f64 {
        match self {
            Side::Right => 1.0,
            Side::Left => -1.0,
        }
    }

    /// The side on which `x` lies relative to `x0`; `x0` itself counts as right.
    pub fn of(x: f64, x0: f64) -> Side {
        if x >= x0 {
            Side::Right
        } else {
            Side::Left
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Right => "right",
            Side::Left => "left",
        })
    }
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "right" | "+" => Ok(Side::Right),
            "left" | "-" => Ok(Side::Left),
            _ => Err(Error::InvalidArgument(format!(
                "unknown side `{s}` (expected right or left)"
            ))),
        }
    }
}

pub const DEFAULT_H0: f64 = 0.25;
pub const DEFAULT_RATIO: f64 = 0.5;
pub const DEFAULT_RUNGS: usize = 12;
pub const DEFAULT_FLOOR: f64 = 1e-6;

/// Geometric step sequence h_k = h0·ρ^k, k = 0..K−1, used to approach x₀.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HLadder {
    pub h0: f64,
    pub ratio: f64,
    pub rungs: usize,
    pub floor: f64,
}

impl Default for HLadder {
    fn default() -> Self {
        HLadder {
            h0: DEFAULT_H0,
            ratio: DEFAULT_RATIO,
            rungs: DEFAULT_RUNGS,
            floor: DEFAULT_FLOOR,
        }
    }
}

impl HLadder {
    pub fn new(h0: f64, ratio: f64, rungs: usize) -> Result<Self> {
        let ladder = HLadder {
            h0,
            ratio,
            rungs,
            ..HLadder::default()
        };
        ladder.validate()?;
        Ok(ladder)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h0.is_finite() && self.h0 > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "h0 must be positive, got {}",
                self.h0
            )));
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "ladder ratio must lie in (0, 1), got {}",
                self.ratio
            )));
        }
        if self.rungs < 2 {
            return Err(Error::InvalidArgument(format!(
                "a ladder needs at least 2 rungs, got {}",
                self.rungs
            )));
        }
        if !(self.floor > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "ladder floor must be positive, got {}",
                self.floor
            )));
        }
        if self.finest() < self.floor {
            return Err(Error::InvalidArgument(format!(
                "finest step {:e} is below the floor {:e}",
                self.finest(),
                self.floor
            )));
        }
        Ok(())
    }

    /// Step sizes, coarsest first.
    pub fn steps(&self) -> Vec<f64> {
        (0..self.rungs)
            .map(|k| self.h0 * self.ratio.powi(k as i32))
            .collect()
    }

    pub fn finest(&self) -> f64 {
        self.h0 * self.ratio.powi(self.rungs as i32 - 1)
    }

    /// Validates the ladder and checks that x₀ ± h₀ lies in the domain.
    pub fn check_domain(&self, domain: &Domain, x0: f64, side: Side) -> Result<()> {
        self.validate()?;
        domain.check(x0)?;
        let far = x0 + side.sign() * self.h0;
        if !domain.contains(far) {
            return Err(Error::InvalidArgument(format!(
                "ladder leaves the domain ({}, {}): x0 {} h0 = {far}",
                domain.a,
                domain.b,
                if side == Side::Right { "+" } else { "-" },
            )));
        }
        Ok(())
    }
}
