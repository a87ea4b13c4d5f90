//! Problem data: customers, candidate sites, demand weights and the
//! attractiveness matrix, plus the text format and random generators.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InstanceError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("non-positive attractiveness v[{i}][{j}] = {value}")]
    NonPositiveAttractiveness { i: usize, j: usize, value: f64 },
    #[error("non-positive demand weight w[{i}] = {value}")]
    NonPositiveWeight { i: usize, value: f64 },
    #[error("{name} = {value} is out of range 1..={n}")]
    CardinalityOutOfRange { name: &'static str, value: usize, n: usize },
    #[error("empty instance (m = {m}, n = {n})")]
    Empty { m: usize, n: usize },
    #[error("dimension mismatch: {0}")]
    Shape(String),
}

/// An SCFLP instance. Immutable once built; `v` is stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    m: usize,
    n: usize,
    w: Vec<f64>,
    v: Vec<f64>,
    p: usize,
    r: usize,
}

impl Instance {
    pub fn new(w: Vec<f64>, v: Vec<Vec<f64>>, p: usize, r: usize) -> Result<Self, InstanceError> {
        let m = w.len();
        let n = v.first().map_or(0, Vec::len);
        if v.len() != m {
            return Err(InstanceError::Shape(format!(
                "{} weight entries but {} attractiveness rows",
                m,
                v.len()
            )));
        }
        if let Some(i) = v.iter().position(|row| row.len() != n) {
            return Err(InstanceError::Shape(format!(
                "row {i} has {} entries, expected {n}",
                v[i].len()
            )));
        }
        Self::from_flat(m, n, w, v.into_iter().flatten().collect(), p, r)
    }

    pub fn from_flat(
        m: usize,
        n: usize,
        w: Vec<f64>,
        v: Vec<f64>,
        p: usize,
        r: usize,
    ) -> Result<Self, InstanceError> {
        if m == 0 || n == 0 {
            return Err(InstanceError::Empty { m, n });
        }
        if w.len() != m || v.len() != m * n {
            return Err(InstanceError::Shape(format!(
                "expected {m} weights and {} attractiveness values, got {} and {}",
                m * n,
                w.len(),
                v.len()
            )));
        }
        if let Some((i, &value)) = w.iter().enumerate().find(|(_, &x)| !(x > 0.0 && x.is_finite())) {
            return Err(InstanceError::NonPositiveWeight { i, value });
        }
        if let Some((k, &value)) = v.iter().enumerate().find(|(_, &x)| !(x > 0.0 && x.is_finite())) {
            return Err(InstanceError::NonPositiveAttractiveness { i: k / n, j: k % n, value });
        }
        for (name, value) in [("p", p), ("r", r)] {
            if value < 1 || value > n {
                return Err(InstanceError::CardinalityOutOfRange { name, value, n });
            }
        }
        Ok(Self { m, n, w, v, p, r })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn w(&self, i: usize) -> f64 {
        self.w[i]
    }

    #[inline]
    pub fn v(&self, i: usize, j: usize) -> f64 {
        self.v[i * self.n + j]
    }

    pub fn v_row(&self, i: usize) -> &[f64] {
        &self.v[i * self.n..(i + 1) * self.n]
    }

    pub fn total_weight(&self) -> f64 {
        self.w.iter().sum()
    }

    /// Same data with different cardinalities.
    pub fn with_cardinalities(&self, p: usize, r: usize) -> Result<Self, InstanceError> {
        Self::from_flat(self.m, self.n, self.w.clone(), self.v.clone(), p, r)
    }

    /// Parses the `scflp 1` text format.
    pub fn parse(text: &str) -> Result<Self, InstanceError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, raw)| (k + 1, raw.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let eof = |what: &str| InstanceError::Parse {
            line: text.lines().count().max(1),
            msg: format!("unexpected end of input, expected {what}"),
        };

        let (line, header) = lines.next().ok_or_else(|| eof("header `scflp 1`"))?;
        let tokens: Vec<&str> = header.split_whitespace().collect();
        if tokens != ["scflp", "1"] {
            return Err(InstanceError::Parse {
                line,
                msg: format!("malformed header `{header}`, expected `scflp 1`"),
            });
        }

        let (line, dims) = lines.next().ok_or_else(|| eof("`m n p r`"))?;
        let dims: Vec<usize> = parse_numbers(dims, line)?;
        let [m, n, p, r] = dims[..] else {
            return Err(InstanceError::Parse {
                line,
                msg: format!("expected 4 integers `m n p r`, got {}", dims.len()),
            });
        };
        if m == 0 || n == 0 {
            return Err(InstanceError::Parse { line, msg: format!("m and n must be positive (m = {m}, n = {n})") });
        }
        for (name, value) in [("p", p), ("r", r)] {
            if value < 1 || value > n {
                return Err(InstanceError::Parse {
                    line,
                    msg: format!("{name} = {value} out of range 1..={n}"),
                });
            }
        }

        let (line, wline) = lines.next().ok_or_else(|| eof("weight line"))?;
        let w: Vec<f64> = parse_numbers(wline, line)?;
        if w.len() != m {
            return Err(InstanceError::Parse { line, msg: format!("expected {m} weights, got {}", w.len()) });
        }
        if let Some(i) = w.iter().position(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(InstanceError::Parse {
                line,
                msg: format!("non-positive demand weight w[{i}] = {}", w[i]),
            });
        }

        let mut v = Vec::with_capacity(m * n);
        for i in 0..m {
            let (line, row) = lines.next().ok_or_else(|| eof(&format!("attractiveness row {}", i + 1)))?;
            let vals: Vec<f64> = parse_numbers(row, line)?;
            if vals.len() != n {
                return Err(InstanceError::Parse {
                    line,
                    msg: format!("expected {n} attractiveness values, got {}", vals.len()),
                });
            }
            if let Some(j) = vals.iter().position(|&x| !(x > 0.0 && x.is_finite())) {
                return Err(InstanceError::Parse {
                    line,
                    msg: format!("non-positive attractiveness v[{i}][{j}] = {}", vals[j]),
                });
            }
            v.extend(vals);
        }
        if let Some((line, _)) = lines.next() {
            return Err(InstanceError::Parse { line, msg: "trailing data after last attractiveness row".into() });
        }
        Self::from_flat(m, n, w, v, p, r)
    }

    /// Serializes to the `scflp 1` text format with shortest round-trip floats.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "scflp 1");
        let _ = writeln!(out, "{} {} {} {}", self.m, self.n, self.p, self.r);
        let join = |xs: &[f64]| xs.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" ");
        let _ = writeln!(out, "{}", join(&self.w));
        for i in 0..self.m {
            let _ = writeln!(out, "{}", join(self.v_row(i)));
        }
        out
    }

    /// The worked three-customer example used as golden data throughout the tests.
    pub fn golden_example() -> Self {
        Self::new(
            vec![1.0, 1.0, 1.0],
            vec![vec![1.0, 2.0, 1.0], vec![2.0, 1.0, 1.0], vec![1.0, 1.0, 2.0]],
            2,
            3,
        )
        .expect("golden instance is valid")
    }
}

impl FromStr for Instance {
    type Err = InstanceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

fn parse_numbers<T: FromStr>(line_text: &str, line: usize) -> Result<Vec<T>, InstanceError> {
    line_text
        .split_whitespace()
        .map(|tok| {
            tok.parse::<T>().map_err(|_| InstanceError::Parse { line, msg: format!("invalid number `{tok}`") })
        })
        .collect()
}

/// A 0/1 choice of open sites (leader `x` or follower `y`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BinaryChoice {
    bits: Vec<bool>,
}

impl BinaryChoice {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn from_sites(n: usize, sites: &[usize]) -> Self {
        let mut bits = vec![false; n];
        for &j in sites {
            bits[j] = true;
        }
        Self { bits }
    }

    pub fn all(n: usize) -> Self {
        Self { bits: vec![true; n] }
    }

    /// Checks that exactly `cardinality` sites are open.
    pub fn with_cardinality(bits: Vec<bool>, cardinality: usize) -> Result<Self, InstanceError> {
        let ones = bits.iter().filter(|&&b| b).count();
        if ones != cardinality {
            return Err(InstanceError::Shape(format!("choice has {ones} open sites, expected {cardinality}")));
        }
        Ok(Self { bits })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn cardinality(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_open(&self, j: usize) -> bool {
        self.bits[j]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Open site indices in ascending order.
    pub fn sites(&self) -> Vec<usize> {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(|(j, _)| j).collect()
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.bits.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
    }
}

impl fmt::Display for BinaryChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (j, b) in self.bits.iter().enumerate() {
            if j > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", u8::from(*b))?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorStyle {
    /// Shared customer/site points, real coordinates on [0,100]², v = 1/(d+1).
    Biesinger,
    /// Independent integer points on [0,70]², v = exp(-0.1 d).
    Qi,
}

impl FromStr for GeneratorStyle {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "biesinger" => Ok(Self::Biesinger),
            "qi" => Ok(Self::Qi),
            other => Err(format!("unknown generator style `{other}` (expected biesinger or qi)")),
        }
    }
}

impl fmt::Display for GeneratorStyle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Biesinger => "biesinger",
            Self::Qi => "qi",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub style: GeneratorStyle,
    pub m: usize,
    pub n: usize,
    pub p: usize,
    pub r: usize,
    pub seed: u64,
}

pub fn generate_instance(params: &GeneratorParams) -> Result<Instance, InstanceError> {
    let GeneratorParams { style, m, n, p, r, seed } = *params;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = |a: (f64, f64), b: (f64, f64)| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
    let v = match style {
        GeneratorStyle::Biesinger => {
            if m != n {
                return Err(InstanceError::Shape(format!(
                    "biesinger style shares customer and site locations, so m must equal n (m = {m}, n = {n})"
                )));
            }
            let pts: Vec<(f64, f64)> =
                (0..n).map(|_| (rng.gen_range(0.0..=100.0), rng.gen_range(0.0..=100.0))).collect();
            let mut v = Vec::with_capacity(m * n);
            for &a in &pts {
                v.extend(pts.iter().map(|&b| 1.0 / (dist(a, b) + 1.0)));
            }
            v
        }
        GeneratorStyle::Qi => {
            let mut point = || (f64::from(rng.gen_range(0u32..=70)), f64::from(rng.gen_range(0u32..=70)));
            let customers: Vec<(f64, f64)> = (0..m).map(|_| point()).collect();
            let sites: Vec<(f64, f64)> = (0..n).map(|_| point()).collect();
            let mut v = Vec::with_capacity(m * n);
            for &a in &customers {
                v.extend(sites.iter().map(|&b| (-0.1 * dist(a, b)).exp()));
            }
            v
        }
    };
    let w = (0..m).map(|_| f64::from(rng.gen_range(1u32..=10))).collect();
    Instance::from_flat(m, n, w, v, p, r)
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOLDEN: &str = "scflp 1\n3 3 2 3\n1 1 1\n1 2 1\n2 1 1\n1 1 2\n";

    #[test]
    fn parses_golden_file() {
        let inst = Instance::parse(GOLDEN).unwrap();
        assert_eq!((inst.m(), inst.n(), inst.p(), inst.r()), (3, 3, 2, 3));
        assert_eq!(inst.v(0, 1), 2.0);
        assert_eq!(inst, Instance::golden_example());
    }

    #[test]
    fn singleton_instance() {
        let inst: Instance = "scflp 1\n1 1 1 1\n1\n1\n".parse().unwrap();
        assert_eq!((inst.m(), inst.n()), (1, 1));
        assert_eq!(inst.v(0, 0), 1.0);
    }

    #[test]
    fn comments_and_exponents() {
        let text = "# header comment\nscflp 1 # version\n\n2 2 1 1\n1e0 2.5E+0\n0.5 1\n3 4 # row two\n";
        let inst = Instance::parse(text).unwrap();
        assert_eq!(inst.weights(), &[1.0, 2.5]);
        assert_eq!(inst.v(1, 1), 4.0);
    }

    #[test]
    fn zero_attractiveness_is_rejected_with_line() {
        let err = Instance::parse("scflp 1\n2 2 1 1\n1 1\n1 0\n1 1\n").unwrap_err();
        match err {
            InstanceError::Parse { line, msg } => {
                assert_eq!(line, 4);
                assert!(msg.contains("non-positive attractiveness"), "{msg}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_inputs() {
        let cases = [
            ("scflp 2\n1 1 1 1\n1\n1\n", 1),
            ("scflp 1\n1 1 1\n1\n1\n", 2),
            ("scflp 1\n2 2 3 1\n1 1\n1 1\n1 1\n", 2),
            ("scflp 1\n2 2 1 0\n1 1\n1 1\n1 1\n", 2),
            ("scflp 1\n2 2 1 1\n1 -1\n1 1\n1 1\n", 3),
            ("scflp 1\n2 2 1 1\n1 1\n1 1 1\n1 1\n", 4),
            ("scflp 1\n2 2 1 1\n1 1\n1 1\n1 x\n", 5),
            ("scflp 1\n1 1 1 1\n1\n1\n9\n", 5),
        ];
        for (text, expected_line) in cases {
            match Instance::parse(text) {
                Err(InstanceError::Parse { line, .. }) => assert_eq!(line, expected_line, "{text:?}"),
                other => panic!("{text:?} gave {other:?}"),
            }
        }
        assert!(matches!(Instance::parse("scflp 1\n2 2 1 1\n1 1\n1 1\n"), Err(InstanceError::Parse { .. })));
    }

    #[test]
    fn round_trip_text() {
        let params = GeneratorParams { style: GeneratorStyle::Qi, m: 4, n: 6, p: 2, r: 3, seed: 11 };
        let inst = generate_instance(&params).unwrap();
        let back = Instance::parse(&inst.to_text()).unwrap();
        assert_eq!(inst, back);
    }

    #[test]
    fn generator_is_deterministic() {
        let params = GeneratorParams { style: GeneratorStyle::Biesinger, m: 5, n: 5, p: 2, r: 2, seed: 7 };
        let a = generate_instance(&params).unwrap();
        let b = generate_instance(&params).unwrap();
        assert_eq!(a.to_text(), b.to_text());
        let c = generate_instance(&GeneratorParams { seed: 8, ..params }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn biesinger_diagonal_is_one() {
        let params = GeneratorParams { style: GeneratorStyle::Biesinger, m: 12, n: 12, p: 2, r: 2, seed: 3 };
        let inst = generate_instance(&params).unwrap();
        for i in 0..12 {
            assert_eq!(inst.v(i, i), 1.0);
            for j in 0..12 {
                assert!(inst.v(i, j) <= 1.0 && inst.v(i, j) > 0.0);
                assert_eq!(inst.v(i, j), inst.v(j, i));
            }
        }
        for &w in inst.weights() {
            assert!((1.0..=10.0).contains(&w) && w.fract() == 0.0);
        }
    }

    #[test]
    fn biesinger_requires_square() {
        let params = GeneratorParams { style: GeneratorStyle::Biesinger, m: 4, n: 5, p: 2, r: 2, seed: 3 };
        assert!(generate_instance(&params).is_err());
    }

    #[test]
    fn qi_values_in_unit_interval() {
        for seed in 0..20 {
            let params = GeneratorParams { style: GeneratorStyle::Qi, m: 15, n: 10, p: 3, r: 2, seed };
            let inst = generate_instance(&params).unwrap();
            for i in 0..inst.m() {
                for &v in inst.v_row(i) {
                    assert!(v > 0.0 && v <= 1.0);
                    // v = exp(-0.1 d) with integer coordinates: v = 1 iff d = 0, otherwise d >= 1.
                    let d = -10.0 * v.ln();
                    assert!(v == 1.0 || d >= 1.0 - 1e-9, "v = {v}");
                }
            }
        }
    }

    #[test]
    fn binary_choice_basics() {
        let x = BinaryChoice::from_sites(4, &[3, 1]);
        assert_eq!(x.sites(), vec![1, 3]);
        assert_eq!(x.cardinality(), 2);
        assert_eq!(x.to_string(), "(0,1,0,1)");
        assert!(BinaryChoice::with_cardinality(vec![true, false], 2).is_err());
    }
}
