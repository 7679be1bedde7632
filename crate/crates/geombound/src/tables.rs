//! The two numerical illustrations as structured tables: the Pólya
//! comparison and the Erlang-service busy-period grid of U values.

use crate::bounds::polya_bounds;
use crate::metrics::tv_distance;
use crate::pmf::{geometric_pmf_auto, polya_pmf};
use crate::queueing::erlang_u;
use crate::Result;

/// One row of the Pólya comparison table.
#[derive(Debug, Clone, Copy)]
pub struct PolyaRow {
    pub m: usize,
    pub d: usize,
    /// p = (d−1)/(d+m−1).
    pub p: f64,
    /// Exact d_TV(W, Geom(p)).
    pub tv_exact: f64,
    /// Upper bound m/(d(d+m−1)).
    pub upper_tv: f64,
    /// Obretenov's Kolmogorov bound 2m/((d+1)(d+m)).
    pub upper_k: f64,
    /// Lower bound m(d−1)/((d+m−2)(d+m−1)²).
    pub lower_tv: f64,
}

pub fn default_polya_rows() -> Vec<(usize, usize)> {
    vec![(200, 200), (200, 10), (10, 10), (10, 200)]
}

pub fn polya_table(rows: &[(usize, usize)]) -> Result<Vec<PolyaRow>> {
    let results = crate::par::map_collect(rows.to_vec(), |(m, d)| -> Result<PolyaRow> {
        if m == 0 {
            // W is a point mass at 0, so is Geom(1): everything vanishes
            return Ok(PolyaRow {
                m,
                d,
                p: 1.0,
                tv_exact: 0.0,
                upper_tv: 0.0,
                upper_k: 0.0,
                lower_tv: 0.0,
            });
        }
        let b = polya_bounds(m, d)?;
        let w = polya_pmf(m, d)?;
        let p = b.upper_tv.approximant_p;
        let y = geometric_pmf_auto(p, 1e-13)?;
        let tv = tv_distance(&w, &y);
        Ok(PolyaRow {
            m,
            d,
            p,
            tv_exact: tv.lo,
            upper_tv: b.upper_tv.value,
            upper_k: b.upper_k_obretenov.value,
            lower_tv: b.lower_tv,
        })
    });
    results.into_iter().collect()
}

/// One cell of the Erlang U grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ErlangCell {
    Value(f64),
    /// U exceeds 1 and carries no information.
    GreaterThanOne,
    /// Parameter choice invalid (kλ ≥ β).
    Invalid,
}

impl ErlangCell {
    pub fn render(&self) -> String {
        match self {
            ErlangCell::Value(u) => format_4dp(*u),
            ErlangCell::GreaterThanOne => ">1".to_string(),
            ErlangCell::Invalid => "--".to_string(),
        }
    }
}

/// The U grid, cells stored row-major over (k, λ) rows × β columns.
#[derive(Debug, Clone)]
pub struct ErlangTable {
    pub ks: Vec<u32>,
    pub lambdas: Vec<f64>,
    pub betas: Vec<f64>,
    pub cells: Vec<ErlangCell>,
}

impl ErlangTable {
    pub fn cell(&self, ki: usize, li: usize, bi: usize) -> ErlangCell {
        self.cells[(ki * self.lambdas.len() + li) * self.betas.len() + bi]
    }
}

pub fn default_erlang_grid() -> (Vec<u32>, Vec<f64>, Vec<f64>) {
    (
        vec![1, 5, 10],
        vec![0.001, 0.005, 0.01, 0.05, 0.1],
        vec![0.1, 0.5, 1.0, 1.5, 10.0],
    )
}

pub fn erlang_table(ks: &[u32], lambdas: &[f64], betas: &[f64]) -> Result<ErlangTable> {
    let mut coords = Vec::with_capacity(ks.len() * lambdas.len() * betas.len());
    for &k in ks {
        for &lambda in lambdas {
            for &beta in betas {
                coords.push((k, lambda, beta));
            }
        }
    }
    let cells = crate::par::map_collect(coords, |(k, lambda, beta)| {
        if k as f64 * lambda >= beta {
            return ErlangCell::Invalid;
        }
        match erlang_u(k, beta, lambda) {
            Ok(u) if u > 1.0 => ErlangCell::GreaterThanOne,
            Ok(u) => ErlangCell::Value(u),
            Err(_) => ErlangCell::Invalid,
        }
    });
    Ok(ErlangTable {
        ks: ks.to_vec(),
        lambdas: lambdas.to_vec(),
        betas: betas.to_vec(),
        cells,
    })
}

/// Fixed four-decimal rendering (the grid's precision).
pub fn format_4dp(v: f64) -> String {
    format!("{v:.4}")
}

/// Four significant figures, fixed-point (the comparison table's format).
pub fn format_4sf(v: f64) -> String {
    if v == 0.0 {
        return "0.000".to_string();
    }
    let mut exp = v.abs().log10().floor() as i32;
    loop {
        let decimals = (3 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        // rounding can push the value into the next decade; re-derive
        let back: f64 = s.parse().unwrap();
        let new_exp = if back == 0.0 {
            exp
        } else {
            back.abs().log10().floor() as i32
        };
        if new_exp == exp {
            return s;
        }
        exp = new_exp;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn four_sig_figs_formatting() {
        assert_eq!(format_4sf(0.0009458123), "0.0009458");
        assert_eq!(format_4sf(0.1732499), "0.1732");
        assert_eq!(format_4sf(0.000219), "0.0002190");
        assert_eq!(format_4sf(0.0999995), "0.1000");
        assert_eq!(format_4sf(12.3456), "12.35");
    }

    #[test]
    fn polya_table_matches_printed_values() {
        let rows = polya_table(&default_polya_rows()).unwrap();
        let expect = [
            ("0.4987", "0.0009458", "0.002506", "0.004975", "0.0006281"),
            ("0.0431", "0.03055", "0.09569", "0.1732", "0.0001981"),
            ("0.4737", "0.02255", "0.05263", "0.09091", "0.01385"),
            ("0.9522", "0.0002190", "0.0002392", "0.0004738", "0.0002190"),
        ];
        for (row, e) in rows.iter().zip(expect) {
            assert_eq!(format_4dp(row.p), e.0);
            assert_eq!(format_4sf(row.tv_exact), e.1);
            assert_eq!(format_4sf(row.upper_tv), e.2);
            assert_eq!(format_4sf(row.upper_k), e.3);
            assert_eq!(format_4sf(row.lower_tv), e.4);
        }
    }

    #[test]
    fn polya_table_degenerate_row() {
        let rows = polya_table(&[(0, 2)]).unwrap();
        assert_eq!(rows[0].tv_exact, 0.0);
        assert_eq!(rows[0].p, 1.0);
    }

    #[test]
    fn erlang_grid_spot_values_and_markers() {
        let (ks, ls, bs) = default_erlang_grid();
        let t = erlang_table(&ks, &ls, &bs).unwrap();
        // k=1, lambda=0.01, beta=1
        match t.cell(0, 2, 2) {
            ErlangCell::Value(u) => assert_abs_diff_eq!(u, 0.1134, epsilon = 5e-5),
            other => panic!("unexpected {other:?}"),
        }
        // k=5, lambda=0.005, beta=0.5; U depends only on k*lambda/beta, so
        // this equals the (0.001, 0.1) cell: 0.378380, rounding to 0.3784
        assert_eq!(t.cell(1, 1, 1).render(), "0.3784");
        // k=10, lambda=0.1, beta=10
        assert_eq!(t.cell(2, 4, 4).render(), "0.5777");
        // k=1, lambda=0.1, beta=0.1: k*lambda >= beta
        assert_eq!(t.cell(0, 4, 0), ErlangCell::Invalid);
        // k=1, lambda=0.05, beta=0.1
        assert_eq!(t.cell(0, 3, 0), ErlangCell::GreaterThanOne);
    }
}
