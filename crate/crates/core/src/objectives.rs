//! Pseudo-Boolean benchmark functions.
//!
//! All objectives are maximized. Fitness is integer-valued except for
//! BinaryValue beyond 62 bits, where the value is carried as the packed bit
//! string and compared lexicographically, which induces exactly the same
//! order.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bits::BitVector;
use crate::error::{Error, Result};

/// Largest dimension for which BinaryValue is evaluated as an `i64`.
pub const BINARYVALUE_EXACT_MAX_DIM: usize = 62;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Fitness {
    Value(i64),
    /// Packed genes, most significant first.
    Lexicographic(Vec<u64>),
}

impl Fitness {
    pub fn as_value(&self) -> Option<i64> {
        match self {
            Fitness::Value(v) => Some(*v),
            Fitness::Lexicographic(_) => None,
        }
    }
}

impl fmt::Display for Fitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fitness::Value(v) => write!(f, "{v}"),
            Fitness::Lexicographic(words) => {
                for w in words {
                    write!(f, "{w:016x}")?;
                }
                Ok(())
            }
        }
    }
}

pub fn onemax(x: &BitVector) -> i64 {
    x.count_ones() as i64
}

/// Length of the all-ones prefix; 0 whenever the first gene is 0.
pub fn leadingones(x: &BitVector) -> i64 {
    x.leading_ones() as i64
}

/// `Σ 2^(D-1-j) x_j`; `None` when `D` exceeds [`BINARYVALUE_EXACT_MAX_DIM`].
pub fn binaryvalue(x: &BitVector) -> Option<i64> {
    if x.len() > BINARYVALUE_EXACT_MAX_DIM {
        return None;
    }
    match x.words().first() {
        None => Some(0),
        Some(&w) => Some((w >> (64 - x.len())) as i64),
    }
}

pub fn needle(x: &BitVector) -> i64 {
    i64::from(x.is_all_ones())
}

/// `D·x_0 + Σ_{j≥1} x_j`; the first gene outweighs every tail.
pub fn dominant_onemax(x: &BitVector) -> i64 {
    let d = x.len() as i64;
    let tail = x.count_ones() as i64 - i64::from(x.get(0));
    if x.get(0) {
        d + tail
    } else {
        tail
    }
}

/// Three bands on `|x|₁`: OneMax below `0.2D`, `-1` on `[0.2D, 0.8D)`, and the
/// optimum value `D` from `0.8D` up.
pub fn trap_nonconverge(x: &BitVector) -> i64 {
    let d = x.len();
    let ones = x.count_ones();
    if 5 * ones < d {
        ones as i64
    } else if 5 * ones < 4 * d {
        -1
    } else {
        d as i64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveKind {
    #[serde(rename = "onemax")]
    OneMax,
    #[serde(rename = "leadingones")]
    LeadingOnes,
    #[serde(rename = "binaryvalue")]
    BinaryValue,
    Needle,
    #[serde(rename = "dominant_onemax")]
    DominantOneMax,
    Trap,
}

impl ObjectiveKind {
    pub const ALL: [ObjectiveKind; 6] = [
        ObjectiveKind::OneMax,
        ObjectiveKind::LeadingOnes,
        ObjectiveKind::BinaryValue,
        ObjectiveKind::Needle,
        ObjectiveKind::DominantOneMax,
        ObjectiveKind::Trap,
    ];

    pub fn id(self) -> &'static str {
        match self {
            ObjectiveKind::OneMax => "onemax",
            ObjectiveKind::LeadingOnes => "leadingones",
            ObjectiveKind::BinaryValue => "binaryvalue",
            ObjectiveKind::Needle => "needle",
            ObjectiveKind::DominantOneMax => "dominant_onemax",
            ObjectiveKind::Trap => "trap",
        }
    }

    fn min_dim(self) -> usize {
        match self {
            ObjectiveKind::DominantOneMax => 2,
            ObjectiveKind::Trap => 5,
            _ => 1,
        }
    }
}

impl fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for ObjectiveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ObjectiveKind::ALL
            .into_iter()
            .find(|k| k.id() == s)
            .ok_or_else(|| Error::UnknownObjective(s.to_string()))
    }
}

/// A benchmark function of fixed dimension, optionally with genes pinned to
/// constants (which makes those genes neutral).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Objective {
    kind: ObjectiveKind,
    dim: usize,
    pins: Vec<(usize, bool)>,
}

impl Objective {
    pub fn new(kind: ObjectiveKind, dim: usize) -> Result<Self> {
        if dim < kind.min_dim() {
            return Err(Error::InvalidParameter(format!(
                "{kind} needs D >= {}, got {dim}",
                kind.min_dim()
            )));
        }
        Ok(Objective {
            kind,
            dim,
            pins: Vec::new(),
        })
    }

    pub fn kind(&self) -> ObjectiveKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn name(&self) -> String {
        let mut s = self.kind.id().to_string();
        for (j, v) in &self.pins {
            s.push_str(&format!("[{j}={}]", u8::from(*v)));
        }
        s
    }

    pub fn pins(&self) -> &[(usize, bool)] {
        &self.pins
    }

    fn raw(&self, x: &BitVector) -> Fitness {
        match self.kind {
            ObjectiveKind::OneMax => Fitness::Value(onemax(x)),
            ObjectiveKind::LeadingOnes => Fitness::Value(leadingones(x)),
            ObjectiveKind::BinaryValue => match binaryvalue(x) {
                Some(v) => Fitness::Value(v),
                None => Fitness::Lexicographic(x.words().to_vec()),
            },
            ObjectiveKind::Needle => Fitness::Value(needle(x)),
            ObjectiveKind::DominantOneMax => Fitness::Value(dominant_onemax(x)),
            ObjectiveKind::Trap => Fitness::Value(trap_nonconverge(x)),
        }
    }

    /// Evaluates `x`, which must have length [`Objective::dim`].
    pub fn evaluate(&self, x: &BitVector) -> Fitness {
        debug_assert_eq!(x.len(), self.dim);
        if self.pins.is_empty() {
            self.raw(x)
        } else {
            let mut y = x.clone();
            for &(j, v) in &self.pins {
                y.set(j, v);
            }
            self.raw(&y)
        }
    }

    /// The maximum of the objective. Every in-scope function attains it at
    /// the all-ones string (with pinned genes overwritten).
    pub fn optimum_value(&self) -> Fitness {
        self.evaluate(&BitVector::ones(self.dim))
    }

    pub fn is_optimal(&self, x: &BitVector) -> bool {
        self.evaluate(x) == self.optimum_value()
    }

    /// Whether every optimum carries a one at gene `j`. Used to detect
    /// premature convergence of a gene to zero.
    pub fn requires_one(&self, j: usize) -> bool {
        match self.kind {
            ObjectiveKind::Trap => false,
            _ => !self.pins.iter().any(|&(p, _)| p == j),
        }
    }
}

/// `f` with gene `j` (0-based) overwritten by `v` before evaluation.
pub fn pin_bit(f: &Objective, j: usize, v: bool) -> Result<Objective> {
    if j >= f.dim {
        return Err(Error::IndexOutOfRange {
            index: j,
            len: f.dim,
        });
    }
    let mut g = f.clone();
    g.pins.retain(|&(p, _)| p != j);
    g.pins.push((j, v));
    Ok(g)
}
