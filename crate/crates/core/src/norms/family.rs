//! Analytic and synthetic test functions, with a small expression syntax for configs.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, Point};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum FunctionFamily {
    /// δ(x)^α.
    PowerAlpha { alpha: f64 },
    /// base + a·ψ(δ)·N(x): lattice noise N at spacing h_noise, ψ vanishing for δ ≤ ε₀.
    BoundarySmoothPlusNoise { base: Box<FunctionFamily>, amplitude: f64, eps0: f64, h_noise: f64, seed: u64 },
    /// Π_k sin(fπx_k) over all axes.
    TensorSine { frequency: f64 },
    /// max(0, 1 − |x − c|/r) over the leading coordinates of c.
    LipschitzBump { center: Vec<f64>, radius: f64 },
    Const { value: f64 },
    /// x_axis^power.
    Coord { axis: usize, power: f64 },
    /// sin(fπx_axis + φ).
    Sine { axis: usize, freq: f64, phase: f64 },
    Cosine { axis: usize, freq: f64, phase: f64 },
    /// clamp((x_axis − x0)/(x1 − x0), 0, 1).
    Ramp { axis: usize, x0: f64, x1: f64 },
    Prod(Vec<FunctionFamily>),
    Sum(Vec<FunctionFamily>),
    Scale { factor: f64, inner: Box<FunctionFamily> },
}

impl FunctionFamily {
    pub fn power_alpha(alpha: f64) -> Self {
        Self::PowerAlpha { alpha }
    }

    pub fn constant(value: f64) -> Self {
        Self::Const { value }
    }

    pub fn coord(axis: usize) -> Self {
        Self::Coord { axis, power: 1.0 }
    }

    pub fn sine(axis: usize, freq: f64) -> Self {
        Self::Sine { axis, freq, phase: 0.0 }
    }

    pub fn cosine(axis: usize, freq: f64) -> Self {
        Self::Cosine { axis, freq, phase: 0.0 }
    }

    pub fn prod(a: Self, b: Self) -> Self {
        Self::Prod(vec![a, b])
    }

    pub fn with_noise(self, amplitude: f64, eps0: f64, h_noise: f64, seed: u64) -> Self {
        Self::BoundarySmoothPlusNoise { base: Box::new(self), amplitude, eps0, h_noise, seed }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Validity(m));
        match self {
            Self::BoundarySmoothPlusNoise { base, amplitude, eps0, h_noise, .. } => {
                if !(*eps0 > 0.0) {
                    return bad(format!("noise support must stay at positive distance from the boundary; got eps0 = {eps0}"));
                }
                if !(*h_noise > 0.0) || !amplitude.is_finite() {
                    return bad(format!("noise scale must be positive; got h_noise = {h_noise}"));
                }
                base.validate()
            }
            Self::LipschitzBump { center, radius } => {
                if !(*radius > 0.0) || center.is_empty() || center.len() > 3 {
                    return bad("lipschitz_bump needs 1 to 3 center coordinates and a positive radius".into());
                }
                Ok(())
            }
            Self::Ramp { x0, x1, .. } if x1 <= x0 => bad(format!("ramp needs x0 < x1; got {x0}, {x1}")),
            Self::Coord { axis, .. } | Self::Sine { axis, .. } | Self::Cosine { axis, .. } | Self::Ramp { axis, .. }
                if *axis > 2 =>
            {
                bad(format!("axis {axis} out of range"))
            }
            Self::Prod(v) | Self::Sum(v) => v.iter().try_for_each(|f| f.validate()),
            Self::Scale { inner, .. } => inner.validate(),
            _ => Ok(()),
        }
    }

    pub fn eval(&self, domain: &DomainSpec, x: &Point) -> f64 {
        match self {
            Self::PowerAlpha { alpha } => {
                let d = domain.raw_delta(x);
                if *alpha == 0.0 {
                    1.0
                } else {
                    d.powf(*alpha)
                }
            }
            Self::BoundarySmoothPlusNoise { base, amplitude, eps0, h_noise, seed } => {
                let b = base.eval(domain, x);
                let d = domain.raw_delta(x);
                if d <= *eps0 {
                    return b;
                }
                let psi = ((d - eps0) / eps0).min(1.0);
                b + amplitude * psi * lattice_noise(x, domain.dim(), *h_noise, *seed)
            }
            Self::TensorSine { frequency } => (0..domain.dim()).map(|k| (frequency * PI * x[k]).sin()).product(),
            Self::LipschitzBump { center, radius } => {
                let r2: f64 = center.iter().enumerate().map(|(k, c)| (x[k] - c).powi(2)).sum();
                (1.0 - r2.sqrt() / radius).max(0.0)
            }
            Self::Const { value } => *value,
            Self::Coord { axis, power } => {
                if *power == 1.0 {
                    x[*axis]
                } else {
                    x[*axis].powf(*power)
                }
            }
            Self::Sine { axis, freq, phase } => (freq * PI * x[*axis] + phase).sin(),
            Self::Cosine { axis, freq, phase } => (freq * PI * x[*axis] + phase).cos(),
            Self::Ramp { axis, x0, x1 } => ((x[*axis] - x0) / (x1 - x0)).clamp(0.0, 1.0),
            Self::Prod(v) => v.iter().map(|f| f.eval(domain, x)).product(),
            Self::Sum(v) => v.iter().map(|f| f.eval(domain, x)).sum(),
            Self::Scale { factor, inner } => factor * inner.eval(domain, x),
        }
    }

    /// Seed of the first stochastic component, if any.
    pub fn seed(&self) -> Option<u64> {
        match self {
            Self::BoundarySmoothPlusNoise { seed, .. } => Some(*seed),
            Self::Prod(v) | Self::Sum(v) => v.iter().find_map(|f| f.seed()),
            Self::Scale { inner, .. } => inner.seed(),
            _ => None,
        }
    }

    /// Lipschitz constant when it is available in closed form.
    pub fn lipschitz(&self) -> Option<f64> {
        match self {
            Self::Const { .. } => Some(0.0),
            Self::Ramp { x0, x1, .. } => Some(1.0 / (x1 - x0)),
            Self::LipschitzBump { radius, .. } => Some(1.0 / radius),
            Self::Coord { power, .. } if *power == 1.0 => Some(1.0),
            Self::PowerAlpha { alpha } if *alpha == 1.0 => Some(1.0),
            Self::Scale { factor, inner } => inner.lipschitz().map(|l| l * factor.abs()),
            _ => None,
        }
    }

    pub fn parse(src: &str) -> Result<Self> {
        let mut p = Parser { s: src.as_bytes(), i: 0 };
        let f = p.expr()?;
        p.ws();
        if p.i != p.s.len() {
            return Err(p.err("trailing input"));
        }
        f.validate()?;
        Ok(f)
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn lattice_value(idx: [i64; 3], seed: u64) -> f64 {
    let mut h = splitmix(seed);
    for k in idx {
        h = splitmix(h ^ k as u64);
    }
    (h >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
}

/// Multilinear interpolation of hashed lattice values in [−1, 1].
fn lattice_noise(x: &Point, dim: usize, h: f64, seed: u64) -> f64 {
    let mut base = [0i64; 3];
    let mut frac = [0.0; 3];
    for k in 0..dim {
        let t = x[k] / h;
        let f = t.floor();
        base[k] = f as i64;
        frac[k] = t - f;
    }
    let mut acc = 0.0;
    for corner in 0..1usize << dim {
        let mut idx = base;
        let mut w = 1.0;
        for k in 0..dim {
            if corner >> k & 1 == 1 {
                idx[k] += 1;
                w *= frac[k];
            } else {
                w *= 1.0 - frac[k];
            }
        }
        if w != 0.0 {
            acc += w * lattice_value(idx, seed);
        }
    }
    acc
}

impl fmt::Display for FunctionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, name: &str, v: &[FunctionFamily]| {
            write!(f, "{name}(")?;
            for (i, g) in v.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{g}")?;
            }
            write!(f, ")")
        };
        match self {
            Self::PowerAlpha { alpha } => write!(f, "power_alpha({alpha:?})"),
            Self::BoundarySmoothPlusNoise { base, amplitude, eps0, h_noise, seed } => {
                write!(f, "noise({base}, {amplitude:?}, {eps0:?}, {h_noise:?}, {seed})")
            }
            Self::TensorSine { frequency } => write!(f, "tensor_sine({frequency:?})"),
            Self::LipschitzBump { center, radius } => {
                write!(f, "lipschitz_bump(")?;
                for c in center {
                    write!(f, "{c:?}, ")?;
                }
                write!(f, "{radius:?})")
            }
            Self::Const { value } => write!(f, "const({value:?})"),
            Self::Coord { axis, power } => write!(f, "coord({axis}, {power:?})"),
            Self::Sine { axis, freq, phase } => write!(f, "sine({axis}, {freq:?}, {phase:?})"),
            Self::Cosine { axis, freq, phase } => write!(f, "cosine({axis}, {freq:?}, {phase:?})"),
            Self::Ramp { axis, x0, x1 } => write!(f, "ramp({axis}, {x0:?}, {x1:?})"),
            Self::Prod(v) => list(f, "prod", v),
            Self::Sum(v) => list(f, "sum", v),
            Self::Scale { factor, inner } => write!(f, "scale({factor:?}, {inner})"),
        }
    }
}

impl TryFrom<String> for FunctionFamily {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        Self::parse(&s)
    }
}

impl From<FunctionFamily> for String {
    fn from(f: FunctionFamily) -> String {
        f.to_string()
    }
}

enum Arg {
    Num(f64),
    Fun(FunctionFamily),
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at column {} of function expression", self.i + 1))
    }

    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.ws();
        if self.s.get(self.i) == Some(&c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn arg(&mut self) -> Result<Arg> {
        self.ws();
        match self.s.get(self.i) {
            Some(c) if c.is_ascii_alphabetic() => Ok(Arg::Fun(self.expr()?)),
            Some(_) => {
                let start = self.i;
                while self.i < self.s.len() && matches!(self.s[self.i], b'0'..=b'9' | b'.' | b'-' | b'+' | b'e' | b'E') {
                    self.i += 1;
                }
                let txt = std::str::from_utf8(&self.s[start..self.i]).unwrap_or("");
                txt.parse::<f64>().map(Arg::Num).map_err(|_| self.err("expected a number"))
            }
            None => Err(self.err("unexpected end")),
        }
    }

    fn expr(&mut self) -> Result<FunctionFamily> {
        self.ws();
        let start = self.i;
        while self.i < self.s.len() && (self.s[self.i].is_ascii_alphanumeric() || self.s[self.i] == b'_') {
            self.i += 1;
        }
        let name = std::str::from_utf8(&self.s[start..self.i]).unwrap_or("").to_string();
        if name.is_empty() {
            return Err(self.err("expected a function name"));
        }
        let mut args = Vec::new();
        if !self.eat(b'(') {
            return Err(self.err("expected '('"));
        }
        if !self.eat(b')') {
            loop {
                args.push(self.arg()?);
                if self.eat(b')') {
                    break;
                }
                if !self.eat(b',') {
                    return Err(self.err("expected ',' or ')'"));
                }
            }
        }
        build(&name, args).map_err(|m| self.err(&m))
    }
}

fn build(name: &str, args: Vec<Arg>) -> std::result::Result<FunctionFamily, String> {
    let mut nums = Vec::new();
    let mut funs = Vec::new();
    for a in args {
        match a {
            Arg::Num(x) => nums.push(x),
            Arg::Fun(f) => funs.push(f),
        }
    }
    let arity = |lo: usize, hi: usize| {
        if nums.len() < lo || nums.len() > hi {
            Err(format!("{name} takes {lo} to {hi} numeric arguments; got {}", nums.len()))
        } else {
            Ok(())
        }
    };
    let axis = |x: f64| {
        if x >= 0.0 && x.fract() == 0.0 && x < 3.0 {
            Ok(x as usize)
        } else {
            Err(format!("{name}: axis must be 0, 1 or 2; got {x}"))
        }
    };
    use FunctionFamily as F;
    let f = match name {
        "power_alpha" => {
            arity(1, 1)?;
            F::PowerAlpha { alpha: nums[0] }
        }
        "delta" => {
            arity(0, 0)?;
            F::PowerAlpha { alpha: 1.0 }
        }
        "tensor_sine" => {
            arity(1, 1)?;
            F::TensorSine { frequency: nums[0] }
        }
        "lipschitz_bump" => {
            arity(2, 4)?;
            let radius = nums.pop().unwrap_or(1.0);
            F::LipschitzBump { center: nums.clone(), radius }
        }
        "const" => {
            arity(1, 1)?;
            F::Const { value: nums[0] }
        }
        "coord" => {
            arity(1, 2)?;
            F::Coord { axis: axis(nums[0])?, power: nums.get(1).copied().unwrap_or(1.0) }
        }
        "sine" | "cosine" => {
            arity(2, 3)?;
            let (axis, freq, phase) = (axis(nums[0])?, nums[1], nums.get(2).copied().unwrap_or(0.0));
            if name == "sine" {
                F::Sine { axis, freq, phase }
            } else {
                F::Cosine { axis, freq, phase }
            }
        }
        "ramp" => {
            arity(3, 3)?;
            F::Ramp { axis: axis(nums[0])?, x0: nums[1], x1: nums[2] }
        }
        "prod" | "sum" if nums.is_empty() && !funs.is_empty() => {
            if name == "prod" {
                F::Prod(funs.clone())
            } else {
                F::Sum(funs.clone())
            }
        }
        "scale" if nums.len() == 1 && funs.len() == 1 => F::Scale { factor: nums[0], inner: Box::new(funs[0].clone()) },
        "noise" if funs.len() == 1 && nums.len() == 4 => {
            let seed = nums[3];
            if seed < 0.0 || seed.fract() != 0.0 {
                return Err(format!("noise seed must be a nonnegative integer; got {seed}"));
            }
            F::BoundarySmoothPlusNoise {
                base: Box::new(funs[0].clone()),
                amplitude: nums[0],
                eps0: nums[1],
                h_noise: nums[2],
                seed: seed as u64,
            }
        }
        "prod" | "sum" | "scale" | "noise" => return Err(format!("wrong arguments for {name}")),
        _ => return Err(format!("unknown function '{name}'")),
    };
    let uses_funs = matches!(f, F::Prod(_) | F::Sum(_) | F::Scale { .. } | F::BoundarySmoothPlusNoise { .. });
    if !uses_funs && !funs.is_empty() {
        return Err(format!("{name} takes only numeric arguments"));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::TangentialBc;

    #[test]
    fn parse_round_trips() {
        for src in [
            "prod(coord(1), cosine(0, 1))",
            "noise(sum(const(1), coord(1, 2)), 0.5, 0.25, 0.0625, 7)",
            "lipschitz_bump(0, 0.3)",
            "scale(-3, tensor_sine(1))",
            "ramp(0, 0.2, 0.8)",
        ] {
            let f = FunctionFamily::parse(src).unwrap();
            assert_eq!(FunctionFamily::parse(&f.to_string()).unwrap(), f);
        }
    }

    #[test]
    fn parse_errors_are_positioned() {
        let e = FunctionFamily::parse("prod(coord(1) cosine(0,1))").unwrap_err();
        assert!(e.to_string().contains("column"));
        assert!(FunctionFamily::parse("wobble(1)").is_err());
        assert!(FunctionFamily::parse("noise(const(1), 1, 0, 0.1, 3)").is_err());
    }

    #[test]
    fn noise_vanishes_near_boundary() {
        let dom = DomainSpec::strip(2, 1.0, 0.5, TangentialBc::Truncated).unwrap();
        let f = FunctionFamily::coord(1).with_noise(1.0, 0.25, 0.0625, 3);
        let x = [0.123, 0.2, 0.0];
        assert_eq!(f.eval(&dom, &x), 0.2);
        let y = [0.123, 0.6, 0.0];
        assert!(f.eval(&dom, &y) != 0.6);
        assert!((f.eval(&dom, &y) - 0.6).abs() <= 1.0);
    }

    #[test]
    fn lattice_noise_interpolates_lattice_values() {
        let v = lattice_noise(&[0.25, 0.5, 0.0], 2, 0.25, 9);
        assert_eq!(v, lattice_value([1, 2, 0], 9));
    }
}
