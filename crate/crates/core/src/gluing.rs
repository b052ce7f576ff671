//! Gluing-equation data: raw exponent rows, the reduced `(A, B, C, D, ν)`
//! form, direct lattice formulas, and the manifold JSON format.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// Exponent rows of the gluing equations as exported by triangulation software.
///
/// `f`, `fp`, `fpp` hold the interior edge rows `i = 2..K`, so they have
/// `K - 1` rows of length `K`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawGluingData {
    pub k: usize,
    pub m: Vec<i64>,
    pub mp: Vec<i64>,
    pub mpp: Vec<i64>,
    pub l: Vec<i64>,
    pub lp: Vec<i64>,
    pub lpp: Vec<i64>,
    pub f: Vec<Vec<i64>>,
    pub fp: Vec<Vec<i64>>,
    pub fpp: Vec<Vec<i64>>,
}

/// Reduced gluing data. Row 1 of `(A|B)` is the meridian, rows `2..K` the
/// interior edges, and `(C|D)` the longitude.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluingData {
    pub name: String,
    pub k: usize,
    pub a: Vec<Vec<i64>>,
    pub b: Vec<Vec<i64>>,
    pub c: Vec<i64>,
    pub d: Vec<i64>,
    pub nu: Vec<i64>,
    /// `2 ν_(K+1)`, which may be odd.
    pub two_nu_last: i64,
}

impl GluingData {
    /// Row `i` (0-based) of `(A|B)`, or `(C|D)` for `i == K`.
    pub fn row(&self, i: usize) -> Vec<i64> {
        if i < self.k {
            self.a[i].iter().chain(&self.b[i]).copied().collect()
        } else {
            self.c.iter().chain(&self.d).copied().collect()
        }
    }
}

/// Reduces raw exponent rows to `(A, B, C, D, ν)`.
pub fn reduce(raw: &RawGluingData, name: &str) -> Result<GluingData> {
    check_raw_shape(raw)?;
    let k = raw.k;
    for (field, rows) in [("F", &raw.f), ("Fp", &raw.fp), ("Fpp", &raw.fpp)] {
        for (r, row) in rows.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                if !(0..=2).contains(&v) {
                    return Err(Error::Range {
                        field,
                        row: r + 2,
                        column: c + 1,
                        value: v,
                    });
                }
            }
        }
    }
    for j in 0..k {
        let dl = raw.l[j] - raw.lp[j];
        if dl % 2 != 0 {
            return Err(Error::Parity { row: "L - Lp", column: j + 1, value: dl });
        }
        let dll = raw.lpp[j] - raw.lp[j];
        if dll % 2 != 0 {
            return Err(Error::Parity { row: "Lpp - Lp", column: j + 1, value: dll });
        }
    }
    let two_nu_last: i64 = -raw.lp.iter().sum::<i64>();

    let mut a = vec![diff(&raw.m, &raw.mp)];
    let mut b = vec![diff(&raw.mpp, &raw.mp)];
    let mut nu = vec![-raw.mp.iter().sum::<i64>()];
    for i in 0..k - 1 {
        a.push(diff(&raw.f[i], &raw.fp[i]));
        b.push(diff(&raw.fpp[i], &raw.fp[i]));
        nu.push(2 - raw.fp[i].iter().sum::<i64>());
    }
    let c = diff(&raw.l, &raw.lp).into_iter().map(|v| v / 2).collect();
    // The longitude's D row is taken relative to L' like every other B-type row.
    let d = diff(&raw.lpp, &raw.lp).into_iter().map(|v| v / 2).collect();
    Ok(GluingData {
        name: name.to_string(),
        k,
        a,
        b,
        c,
        d,
        nu,
        two_nu_last,
    })
}

fn diff(x: &[i64], y: &[i64]) -> Vec<i64> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

fn check_raw_shape(raw: &RawGluingData) -> Result<()> {
    let k = raw.k;
    if k == 0 {
        return Err(Error::schema("K", "must be positive"));
    }
    let vectors = [
        ("raw.M", &raw.m),
        ("raw.Mp", &raw.mp),
        ("raw.Mpp", &raw.mpp),
        ("raw.L", &raw.l),
        ("raw.Lp", &raw.lp),
        ("raw.Lpp", &raw.lpp),
    ];
    for (path, v) in vectors {
        if v.len() != k {
            return Err(Error::schema(path, format!("expected {k} entries, found {}", v.len())));
        }
    }
    for (path, rows) in [("raw.F", &raw.f), ("raw.Fp", &raw.fp), ("raw.Fpp", &raw.fpp)] {
        if rows.len() != k - 1 {
            return Err(Error::schema(path, format!("expected {} rows, found {}", k - 1, rows.len())));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(Error::schema(
                    format!("{path}[{i}]"),
                    format!("expected {k} entries, found {}", row.len()),
                ));
            }
        }
    }
    Ok(())
}

/// An affine integer function of `(m, e, e_2, ..., e_K)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Affine {
    #[serde(rename = "const", default)]
    pub constant: i64,
    #[serde(default)]
    pub m: i64,
    #[serde(default)]
    pub e: i64,
    /// Coefficients of the summation variables; missing trailing entries are 0.
    #[serde(default)]
    pub evars: Vec<i64>,
}

impl Affine {
    pub fn new(constant: i64, m: i64, e: i64, evars: Vec<i64>) -> Self {
        Affine { constant, m, e, evars }
    }

    pub fn eval(&self, m: i64, e: i64, vars: &[i64]) -> i64 {
        self.constant
            + self.m * m
            + self.e * e
            + self.evars.iter().zip(vars).map(|(a, v)| a * v).sum::<i64>()
    }

    pub fn scaled(&self, k: i64) -> Affine {
        Affine {
            constant: self.constant * k,
            m: self.m * k,
            e: self.e * k,
            evars: self.evars.iter().map(|v| v * k).collect(),
        }
    }
}

/// A cusped index given directly as a lattice sum:
/// `sum over vars of (-x^(1/2))^prefactor * prod_i I_Δ(a_i, b_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeIndexFormula {
    pub prefactor: Affine,
    pub tet_args: Vec<[Affine; 2]>,
    pub sum_vars: usize,
}

impl LatticeIndexFormula {
    pub fn tetrahedra(&self) -> usize {
        self.tet_args.len()
    }

    pub fn validate(&self) -> Result<()> {
        let check = |path: String, a: &Affine| {
            if a.evars.len() > self.sum_vars {
                Err(Error::schema(
                    format!("{path}.evars"),
                    format!("{} coefficients for {} summation variables", a.evars.len(), self.sum_vars),
                ))
            } else {
                Ok(())
            }
        };
        check("formula.prefactor".into(), &self.prefactor)?;
        for (i, [a, b]) in self.tet_args.iter().enumerate() {
            check(format!("formula.tet_args[{i}][0]"), a)?;
            check(format!("formula.tet_args[{i}][1]"), b)?;
        }
        Ok(())
    }
}

/// Where a manifold's cusped index comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ManifoldSource {
    /// Gluing data, optionally with a caller-supplied symplectic completion.
    Gluing {
        data: GluingData,
        frame: Option<Vec<Vec<i64>>>,
    },
    Formula(LatticeIndexFormula),
}

/// A parsed manifold description.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifoldSpec {
    pub name: String,
    pub k: usize,
    pub source: ManifoldSource,
    /// Maps reported slope coordinates `(p, q)` to `(μ, λ)` coefficients.
    pub slope_basis: [[i64; 2]; 2],
}

pub const IDENTITY_BASIS: [[i64; 2]; 2] = [[1, 0], [0, 1]];

pub fn parse_manifold_file(path: &Path) -> Result<ManifoldSpec> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_manifold_str(&text)
}

pub fn parse_manifold_str(text: &str) -> Result<ManifoldSpec> {
    let root: Value = serde_json::from_str(text).map_err(|err| Error::schema("$", err.to_string()))?;
    let obj = root.as_object().ok_or_else(|| Error::schema("$", "expected an object"))?;
    let name = obj
        .get("name")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::schema("name", "expected a string"))?
        .to_string();
    let k = int(obj.get("K"), "K")?;
    if k <= 0 {
        return Err(Error::schema("K", format!("must be positive, found {k}")));
    }
    let k = k as usize;
    let slope_basis = match obj.get("slope_basis") {
        None => IDENTITY_BASIS,
        Some(v) => {
            let rows = matrix(Some(v), "slope_basis", 2, 2)?;
            let basis = [[rows[0][0], rows[0][1]], [rows[1][0], rows[1][1]]];
            let det = basis[0][0] * basis[1][1] - basis[0][1] * basis[1][0];
            if det.abs() != 1 {
                return Err(Error::schema("slope_basis", format!("determinant {det} is not ±1")));
            }
            basis
        }
    };

    let present: Vec<&str> = ["raw", "reduced", "formula"]
        .into_iter()
        .filter(|key| obj.contains_key(*key))
        .collect();
    if present.len() != 1 {
        return Err(Error::schema("$", "exactly one of raw, reduced, formula is required"));
    }
    let source = match present[0] {
        "raw" => {
            let raw = &obj["raw"];
            let raw = RawGluingData {
                k,
                m: vector(raw.get("M"), "raw.M", k)?,
                mp: vector(raw.get("Mp"), "raw.Mp", k)?,
                mpp: vector(raw.get("Mpp"), "raw.Mpp", k)?,
                l: vector(raw.get("L"), "raw.L", k)?,
                lp: vector(raw.get("Lp"), "raw.Lp", k)?,
                lpp: vector(raw.get("Lpp"), "raw.Lpp", k)?,
                f: matrix(raw.get("F"), "raw.F", k - 1, k)?,
                fp: matrix(raw.get("Fp"), "raw.Fp", k - 1, k)?,
                fpp: matrix(raw.get("Fpp"), "raw.Fpp", k - 1, k)?,
            };
            ManifoldSource::Gluing {
                data: reduce(&raw, &name)?,
                frame: frame(obj.get("frame"), k)?,
            }
        }
        "reduced" => {
            let red = &obj["reduced"];
            let data = GluingData {
                name: name.clone(),
                k,
                a: matrix(red.get("A"), "reduced.A", k, k)?,
                b: matrix(red.get("B"), "reduced.B", k, k)?,
                c: vector(red.get("C"), "reduced.C", k)?,
                d: vector(red.get("D"), "reduced.D", k)?,
                nu: vector(red.get("nu"), "reduced.nu", k)?,
                two_nu_last: int(red.get("two_nu_last"), "reduced.two_nu_last")?,
            };
            ManifoldSource::Gluing {
                data,
                frame: frame(obj.get("frame"), k)?,
            }
        }
        _ => {
            let formula: LatticeIndexFormula = serde_json::from_value(obj["formula"].clone())
                .map_err(|err| Error::schema("formula", err.to_string()))?;
            if formula.tet_args.len() != k {
                return Err(Error::schema(
                    "formula.tet_args",
                    format!("expected {k} argument pairs, found {}", formula.tet_args.len()),
                ));
            }
            formula.validate()?;
            ManifoldSource::Formula(formula)
        }
    };
    Ok(ManifoldSpec {
        name,
        k,
        source,
        slope_basis,
    })
}

fn int(v: Option<&Value>, path: &str) -> Result<i64> {
    v.and_then(Value::as_i64)
        .ok_or_else(|| Error::schema(path, "expected an integer"))
}

fn vector(v: Option<&Value>, path: &str, len: usize) -> Result<Vec<i64>> {
    let arr = v
        .and_then(Value::as_array)
        .ok_or_else(|| Error::schema(path, "expected an array of integers"))?;
    if arr.len() != len {
        return Err(Error::schema(path, format!("expected {len} entries, found {}", arr.len())));
    }
    arr.iter()
        .enumerate()
        .map(|(i, x)| int(Some(x), &format!("{path}[{i}]")))
        .collect()
}

fn matrix(v: Option<&Value>, path: &str, rows: usize, cols: usize) -> Result<Vec<Vec<i64>>> {
    let arr = v
        .and_then(Value::as_array)
        .ok_or_else(|| Error::schema(path, "expected an array of rows"))?;
    if arr.len() != rows {
        return Err(Error::schema(path, format!("expected {rows} rows, found {}", arr.len())));
    }
    arr.iter()
        .enumerate()
        .map(|(i, row)| vector(Some(row), &format!("{path}[{i}]"), cols))
        .collect()
}

fn frame(v: Option<&Value>, k: usize) -> Result<Option<Vec<Vec<i64>>>> {
    v.map(|v| matrix(Some(v), "frame", 2 * k, 2 * k)).transpose()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn figure_eight_raw() -> RawGluingData {
        RawGluingData {
            k: 2,
            m: vec![1, 0],
            mp: vec![0, -1],
            mpp: vec![0, 0],
            l: vec![0, 0],
            lp: vec![0, -2],
            lpp: vec![0, 2],
            f: vec![vec![0, 1]],
            fp: vec![vec![1, 2]],
            fpp: vec![vec![2, 0]],
        }
    }

    #[test]
    fn figure_eight_reduction() {
        let g = reduce(&figure_eight_raw(), "4_1").unwrap();
        assert_eq!(g.a, vec![vec![1, 1], vec![-1, -1]]);
        assert_eq!(g.b, vec![vec![0, 1], vec![1, -2]]);
        assert_eq!(g.c, vec![0, 1]);
        assert_eq!(g.d, vec![0, 2]);
        assert_eq!(g.nu, vec![1, -1]);
        assert_eq!(g.two_nu_last, 2);
    }

    #[test]
    fn empty_sums() {
        let k = 3;
        let raw = RawGluingData {
            k,
            m: vec![1, 0, 0],
            mp: vec![0; k],
            mpp: vec![0; k],
            l: vec![0; k],
            lp: vec![0; k],
            lpp: vec![0; k],
            f: vec![vec![1, 0, 0]; k - 1],
            fp: vec![vec![0; k]; k - 1],
            fpp: vec![vec![0; k]; k - 1],
        };
        let g = reduce(&raw, "zeros").unwrap();
        assert_eq!(g.nu, vec![0, 2, 2]);
        assert_eq!(g.two_nu_last, 0);
    }

    #[test]
    fn odd_longitude_is_parity_error() {
        let mut raw = figure_eight_raw();
        raw.l[1] = 1;
        assert!(matches!(reduce(&raw, "x"), Err(Error::Parity { .. })));
    }

    #[test]
    fn edge_exponent_range() {
        let mut raw = figure_eight_raw();
        raw.fpp[0][1] = 3;
        let err = reduce(&raw, "x").unwrap_err();
        assert!(matches!(err, Error::Range { field: "Fpp", row: 2, column: 2, value: 3 }), "{err}");
    }

    #[test]
    fn k_zero_is_schema_error() {
        let text = r#"{"name": "bad", "K": 0, "reduced": {}}"#;
        assert!(matches!(parse_manifold_str(text), Err(Error::Schema { .. })));
    }

    #[test]
    fn schema_errors_name_the_field() {
        let text = r#"{"name": "bad", "K": 1, "reduced": {"A": [[1]], "B": [[0]], "C": [0], "D": [1, 2], "nu": [0], "two_nu_last": 0}}"#;
        match parse_manifold_str(text) {
            Err(Error::Schema { path, .. }) => assert_eq!(path, "reduced.D"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn formula_arity_checked() {
        let text = r#"{"name": "f", "K": 1, "formula": {"prefactor": {"const": 0, "m": 0, "e": 0, "evars": [1, 2]},
                       "tet_args": [[{"m": 1}, {"e": 1}]], "sum_vars": 1}}"#;
        match parse_manifold_str(text) {
            Err(Error::Schema { path, .. }) => assert_eq!(path, "formula.prefactor.evars"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
