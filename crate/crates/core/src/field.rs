use std::io::{BufRead, Write};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{make_grid, Grading, RadialGrid};
use crate::params::ModelParams;

/// Samples `v_j ~ v(r_j)` of the transformed unknown `v = r^{(d-2)/2} u`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialField {
    pub grid: Arc<RadialGrid>,
    pub values: Vec<Complex64>,
}

impl RadialField {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if values
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidArgument(
                "field contains non-finite values".into(),
            ));
        }
        Ok(RadialField { grid, values })
    }

    pub fn zeros(grid: Arc<RadialGrid>) -> Self {
        let n = grid.len();
        RadialField {
            grid,
            values: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    /// Samples a transformed profile `v(r)`.
    pub fn from_fn(grid: Arc<RadialGrid>, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.nodes.iter().map(|&r| f(r)).collect();
        RadialField { grid, values }
    }

    pub fn from_real(grid: Arc<RadialGrid>, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |r| Complex64::new(f(r), 0.0))
    }

    /// Samples a physical profile `u(r)` and stores `v = r^{(d-2)/2} u`.
    pub fn from_physical(
        grid: Arc<RadialGrid>,
        params: &ModelParams,
        u: impl Fn(f64) -> Complex64,
    ) -> Self {
        let a = params.transform_power();
        Self::from_fn(grid, |r| u(r) * r.powf(a))
    }

    /// Physical samples `u_j = r_j^{-(d-2)/2} v_j`.
    pub fn physical(&self, params: &ModelParams) -> Vec<Complex64> {
        let a = params.transform_power();
        self.grid
            .nodes
            .iter()
            .zip(&self.values)
            .map(|(r, v)| v * r.powf(-a))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        RadialField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm()).collect()
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    /// Same values carried on another grid with the same number of cells.
    pub fn with_grid(&self, grid: Arc<RadialGrid>) -> Result<Self> {
        RadialField::new(grid, self.values.clone())
    }
}

/// Header recorded alongside a serialised field.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldHeader {
    pub d: u32,
    pub alpha: f64,
    pub p: f64,
    pub n: usize,
    pub r_max: f64,
    pub grading: Grading,
}

/// Writes the columnar text form: header lines then `r Re(v) Im(v)` rows.
pub fn write_field<W: Write>(mut w: W, field: &RadialField, params: &ModelParams) -> Result<()> {
    let g = &field.grid;
    writeln!(
        w,
        "# d={} alpha={:.16e} p={:.16e} N={} r_max={:.16e}",
        params.d,
        params.alpha,
        params.p,
        g.len(),
        g.r_max
    )?;
    writeln!(w, "# grading={}", g.grading)?;
    for (r, v) in g.nodes.iter().zip(&field.values) {
        writeln!(w, "{:.16e} {:.16e} {:.16e}", r, v.re, v.im)?;
    }
    Ok(())
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn header_value<T: std::str::FromStr>(line_no: usize, line: &str, key: &str) -> Result<T> {
    let token = line
        .split_whitespace()
        .find_map(|tok| tok.strip_prefix(&format!("{key}=")))
        .ok_or_else(|| parse_err(line_no, format!("header is missing '{key}='")))?;
    token
        .parse()
        .map_err(|_| parse_err(line_no, format!("cannot parse '{key}={token}'")))
}

/// Reads a field written by [`write_field`]. The grid is rebuilt from the
/// header and every node is checked against the `r` column.
pub fn read_field<R: BufRead>(r: R) -> Result<(RadialField, FieldHeader)> {
    let mut header: Option<(u32, f64, f64, usize, f64)> = None;
    let mut grading = Grading::Uniform;
    let mut rows: Vec<(usize, f64, Complex64)> = Vec::new();
    for (idx, line) in r.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        if let Some(rest) = t.strip_prefix('#') {
            if rest.contains("d=") && rest.contains("N=") {
                header = Some((
                    header_value(line_no, rest, "d")?,
                    header_value(line_no, rest, "alpha")?,
                    header_value(line_no, rest, "p")?,
                    header_value(line_no, rest, "N")?,
                    header_value(line_no, rest, "r_max")?,
                ));
            } else if let Some(gr) = rest.trim().strip_prefix("grading=") {
                grading = gr
                    .parse()
                    .map_err(|e: Error| parse_err(line_no, e.to_string()))?;
            }
            continue;
        }
        let cols: Vec<&str> = t.split_whitespace().collect();
        if cols.len() != 3 {
            return Err(parse_err(
                line_no,
                format!("expected 3 columns, found {}", cols.len()),
            ));
        }
        let mut nums = [0.0; 3];
        for (k, c) in cols.iter().enumerate() {
            nums[k] = c
                .parse()
                .map_err(|_| parse_err(line_no, format!("cannot parse number '{c}'")))?;
        }
        rows.push((line_no, nums[0], Complex64::new(nums[1], nums[2])));
    }
    let (d, alpha, p, n, r_max) =
        header.ok_or_else(|| parse_err(1, "missing '# d=... N=...' header"))?;
    if rows.len() != n {
        return Err(parse_err(
            rows.last().map_or(1, |r| r.0),
            format!("header declares N={n} but {} rows were read", rows.len()),
        ));
    }
    let grid = make_grid(n, r_max, grading).map_err(|e| parse_err(1, e.to_string()))?;
    for ((line_no, r, _), node) in rows.iter().zip(&grid.nodes) {
        if (r - node).abs() > 1e-10 * r_max {
            return Err(parse_err(
                *line_no,
                format!("node {r} does not match grid node {node}"),
            ));
        }
    }
    let values = rows.into_iter().map(|(_, _, v)| v).collect();
    let field = RadialField::new(Arc::new(grid), values)?;
    Ok((
        field,
        FieldHeader {
            d,
            alpha,
            p,
            n,
            r_max,
            grading,
        },
    ))
}
