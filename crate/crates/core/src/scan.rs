//! Parameter sweeps over block size, comparing exact entropies with the
//! closed-form asymptotics, and their CSV output.

use std::io::Write;

use rayon::prelude::*;

use crate::entropy::{
    asymptotic_entropy_finite, asymptotic_entropy_infinite, sector_entropy, shannon_entropy_bits,
};
use crate::spectrum::{thermodynamic_spectrum, SectorSpec};
use crate::{Error, Result};

pub const CSV_HEADER: &str = "L,n,p,N,S_exact,S_asymptotic,abs_error,npq_eff";

/// Significant digits kept in every emitted value.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_significant(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses")
}

/// Shortest decimal text that reads back as `round_significant(x)`.
pub fn format_significant(x: f64) -> String {
    let r = round_significant(x);
    if r == 0.0 {
        return "0".into();
    }
    let a = r.abs();
    if (1e-6..1e16).contains(&a) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

/// Parses a filling given as a fraction (`1/10`) or a decimal (`0.5`).
pub fn parse_filling(text: &str) -> Result<f64> {
    let bad = || Error::Domain(format!("cannot parse filling {text:?}"));
    let value = match text.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().map_err(|_| bad())?;
            let den: f64 = den.trim().parse().map_err(|_| bad())?;
            if den == 0.0 {
                return Err(bad());
            }
            num / den
        }
        None => text.trim().parse().map_err(|_| bad())?,
    };
    if value > 0.0 && value < 1.0 {
        Ok(value)
    } else {
        Err(Error::FillingOutOfRange(value))
    }
}

/// One sampled block size. Floating fields are held at 12 significant
/// digits so a row survives a CSV round trip unchanged; `abs_error` is
/// computed from the rounded entropies.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanRow {
    /// `None` for the thermodynamic limit.
    pub length: Option<u64>,
    pub block: u64,
    pub p: f64,
    /// `None` for the thermodynamic limit.
    pub up: Option<u64>,
    pub s_exact: f64,
    pub s_asymptotic: f64,
    pub abs_error: f64,
    pub npq_eff: f64,
}

impl ScanRow {
    pub fn new(
        length: Option<u64>,
        block: u64,
        p: f64,
        up: Option<u64>,
        s_exact: f64,
        s_asymptotic: f64,
    ) -> Self {
        let s_exact = round_significant(s_exact);
        let s_asymptotic = round_significant(s_asymptotic);
        let n = block as f64;
        let npq = n * p * (1.0 - p);
        let npq_eff = match length {
            Some(l) => npq * (l - block) as f64 / l as f64,
            None => npq,
        };
        ScanRow {
            length,
            block,
            p: round_significant(p),
            up,
            s_exact,
            s_asymptotic,
            abs_error: round_significant((s_exact - s_asymptotic).abs()),
            npq_eff: round_significant(npq_eff),
        }
    }
}

fn block_sizes(n_from: u64, n_to: u64, step: u64) -> Result<Vec<u64>> {
    if step == 0 || n_from > n_to {
        return Err(Error::EmptyRange);
    }
    Ok((n_from..=n_to).step_by(step as usize).collect())
}

/// Exact sector entropy against the finite-size asymptotic for a chain of
/// `length` sites at filling `p`, snapped to `N = round(pL)` up-spins. Both
/// columns use the snapped filling `N / L`.
pub fn scan_finite(length: u64, p: f64, n_from: u64, n_to: u64, step: u64) -> Result<Vec<ScanRow>> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::FillingOutOfRange(p));
    }
    let sizes = block_sizes(n_from, n_to, step)?;
    if sizes[0] == 0 || *sizes.last().unwrap() >= length {
        return Err(Error::Domain(format!(
            "block sizes must lie in 1..={} for L = {length}",
            length.saturating_sub(1)
        )));
    }
    let up = (p * length as f64).round() as u64;
    let p_eff = up as f64 / length as f64;
    if up == 0 || up == length {
        return Err(Error::Domain(format!(
            "filling {p} snaps to N = {up} on L = {length}, a product state"
        )));
    }
    sizes
        .par_iter()
        .map(|&block| {
            let exact = sector_entropy(&SectorSpec::new(length, up, block)?)?;
            let asym = asymptotic_entropy_finite(length, block, p_eff)?;
            Ok(ScanRow::new(
                Some(length),
                block,
                p_eff,
                Some(up),
                exact.bits(),
                asym.bits(),
            ))
        })
        .collect()
}

/// Exact binomial-spectrum entropy against the infinite-chain asymptotic.
pub fn scan_infinite(p: f64, n_from: u64, n_to: u64, step: u64) -> Result<Vec<ScanRow>> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::FillingOutOfRange(p));
    }
    let sizes = block_sizes(n_from, n_to, step)?;
    if sizes[0] == 0 {
        return Err(Error::Domain("block sizes must be at least 1".into()));
    }
    sizes
        .par_iter()
        .map(|&block| {
            let exact = shannon_entropy_bits(&thermodynamic_spectrum(block, p)?)?;
            let asym = asymptotic_entropy_infinite(block, p)?;
            Ok(ScanRow::new(None, block, p, None, exact.bits(), asym.bits()))
        })
        .collect()
}

/// Writes the header and one line per row; returns the number of rows.
pub fn emit_csv<W: Write>(rows: &[ScanRow], mut out: W) -> Result<usize> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        let length = row
            .length
            .map_or_else(|| "inf".to_string(), |l| l.to_string());
        let up = row.up.map_or_else(String::new, |n| n.to_string());
        writeln!(
            out,
            "{length},{},{},{up},{},{},{},{}",
            row.block,
            format_significant(row.p),
            format_significant(row.s_exact),
            format_significant(row.s_asymptotic),
            format_significant(row.abs_error),
            format_significant(row.npq_eff),
        )?;
    }
    out.flush()?;
    Ok(rows.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_significant(2.0), "2");
        assert_eq!(format_significant(0.0), "0");
        assert_eq!(format_significant(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_significant(1.2516291673878228), "1.25162916739");
        assert_eq!(format_significant(1.0e-300), "1e-300");
        assert_eq!(format_significant(-0.5), "-0.5");
    }

    #[test]
    fn filling_parser() {
        assert_eq!(parse_filling("1/10").unwrap(), 0.1);
        assert_eq!(parse_filling("0.5").unwrap(), 0.5);
        assert_eq!(parse_filling(" 1 / 2 ").unwrap(), 0.5);
        assert!(parse_filling("1/0").is_err());
        assert!(parse_filling("3/2").is_err());
        assert!(parse_filling("0").is_err());
        assert!(parse_filling("half").is_err());
    }

    #[test]
    fn finite_examples() {
        let rows = scan_finite(20, 0.5, 1, 10, 1).unwrap();
        assert_eq!(rows.len(), 10);
        assert!(rows[9].s_exact > rows[0].s_exact);
        let rows = scan_finite(2, 0.5, 1, 1, 1).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].s_exact, 1.0);
        assert_eq!(rows[0].up, Some(1));
    }

    #[test]
    fn finite_error_shrinks_with_block_at_low_filling() {
        let rows = scan_finite(200, 0.1, 1, 100, 1).unwrap();
        assert!(rows[99].abs_error < rows[4].abs_error);
    }

    #[test]
    fn infinite_examples() {
        let rows = scan_infinite(0.5, 1, 1, 1).unwrap();
        assert_eq!(rows[0].s_exact, 1.0);
        assert_eq!(rows[0].length, None);
        assert_eq!(rows[0].up, None);
    }

    #[test]
    fn scan_errors() {
        assert!(matches!(scan_finite(20, 0.5, 5, 4, 1), Err(Error::EmptyRange)));
        assert!(matches!(scan_finite(20, 0.5, 1, 4, 0), Err(Error::EmptyRange)));
        assert!(scan_finite(20, 0.5, 1, 20, 1).is_err());
        assert!(scan_finite(20, 0.5, 0, 3, 1).is_err());
        assert!(scan_finite(20, 0.01, 1, 3, 1).is_err());
        assert!(scan_infinite(1.0, 1, 3, 1).is_err());
    }

    #[test]
    fn csv_line_counts() {
        let mut buf = Vec::new();
        assert_eq!(emit_csv(&[], &mut buf).unwrap(), 0);
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{CSV_HEADER}\n"));

        let rows = scan_finite(20, 0.5, 1, 3, 1).unwrap();
        let mut buf = Vec::new();
        assert_eq!(emit_csv(&rows, &mut buf).unwrap(), 3);
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn infinite_rows_use_inf_and_empty_up() {
        let rows = scan_infinite(0.5, 2, 2, 1).unwrap();
        let mut buf = Vec::new();
        emit_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let line = text.lines().nth(1).unwrap();
        assert!(line.starts_with("inf,2,0.5,,"), "{line}");
    }
}
