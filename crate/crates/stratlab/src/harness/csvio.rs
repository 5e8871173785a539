//! CSV writing and reading for ledgers and rate reports.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a fixed
//! seed and config reproduce byte-identical files.

use std::io::{BufWriter, Write};
use std::path::Path;

use crate::spectral::ledger::{EnergyLedger, LedgerRow};
use crate::{Error, Result};

pub const LEDGER_HEADER: &[&str] = &[
    "t", "E", "D_gamma", "D_tau", "D_alpha", "D_taualpha", "D_beta", "D_rho", "D_rhoalpha",
    "intD", "G",
];

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()?;
    Ok(())
}

pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

pub fn write_ledger_csv(path: &Path, ledger: &EnergyLedger) -> Result<()> {
    let rows: Vec<Vec<String>> = ledger
        .rows
        .iter()
        .map(|r| {
            vec![
                fmt_f64(r.t),
                fmt_f64(r.energy),
                fmt_f64(r.d_gamma),
                fmt_f64(r.d_tau),
                fmt_f64(r.d_alpha),
                fmt_f64(r.d_taualpha),
                fmt_f64(r.d_beta),
                fmt_f64(r.d_rho),
                fmt_f64(r.d_rhoalpha),
                fmt_f64(r.int_d),
                fmt_f64(r.g_value),
            ]
        })
        .collect();
    write_csv(path, LEDGER_HEADER, &rows)
}

/// Parses a CSV produced by [`write_ledger_csv`].
pub fn read_ledger_csv(text: &str) -> Result<Vec<LedgerRow>> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Fit("empty ledger csv".to_string()))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols != LEDGER_HEADER {
        return Err(Error::Fit(format!("unexpected ledger header {header:?}")));
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != LEDGER_HEADER.len() {
            return Err(Error::Fit(format!(
                "ledger row {} has {} fields, expected {}",
                i + 2,
                fields.len(),
                LEDGER_HEADER.len()
            )));
        }
        let mut vals = [0.0f64; 11];
        for (slot, field) in vals.iter_mut().zip(&fields) {
            *slot = field
                .trim()
                .parse()
                .map_err(|_| Error::Fit(format!("bad float {field:?} in ledger row {}", i + 2)))?;
        }
        rows.push(LedgerRow {
            t: vals[0],
            energy: vals[1],
            d_gamma: vals[2],
            d_tau: vals[3],
            d_alpha: vals[4],
            d_taualpha: vals[5],
            d_beta: vals[6],
            d_rho: vals[7],
            d_rhoalpha: vals[8],
            int_d: vals[9],
            g_value: vals[10],
        });
    }
    Ok(rows)
}

/// Extracts a (t, column) series from any of this crate's CSVs.
pub fn read_series(text: &str, column: &str) -> Result<Vec<(f64, f64)>> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Fit("empty csv".to_string()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let t_idx = cols
        .iter()
        .position(|&c| c == "t")
        .ok_or_else(|| Error::Fit("csv has no `t` column".to_string()))?;
    let v_idx = cols
        .iter()
        .position(|&c| c == column)
        .ok_or_else(|| Error::Fit(format!("csv has no {column:?} column")))?;
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() <= t_idx.max(v_idx) {
            return Err(Error::Fit(format!("short row {} in csv", i + 2)));
        }
        let t: f64 = fields[t_idx]
            .trim()
            .parse()
            .map_err(|_| Error::Fit(format!("bad t value in row {}", i + 2)))?;
        let v: f64 = fields[v_idx]
            .trim()
            .parse()
            .map_err(|_| Error::Fit(format!("bad {column} value in row {}", i + 2)))?;
        out.push((t, v));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ledger_round_trip() {
        let mut ledger = EnergyLedger::new(0.05, 0.01);
        for i in 0..4 {
            ledger.push(LedgerRow {
                t: i as f64 * 0.5,
                energy: 1.0 / (1.0 + i as f64),
                d_gamma: 0.1,
                d_tau: 0.02,
                d_alpha: 0.0,
                d_taualpha: 0.0,
                d_beta: 1e-9,
                d_rho: 0.3,
                d_rhoalpha: 0.0,
                int_d: 0.0,
                g_value: 0.0,
            });
        }
        let dir = std::env::temp_dir().join("stratlab-csv-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("ledger.csv");
        write_ledger_csv(&path, &ledger).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let rows = read_ledger_csv(&text).unwrap();
        assert_eq!(rows.len(), 4);
        for (a, b) in ledger.rows.iter().zip(&rows) {
            assert_eq!(a.t, b.t);
            assert_eq!(a.energy, b.energy);
            assert_eq!(a.int_d, b.int_d);
            assert_eq!(a.g_value, b.g_value);
        }
        let series = read_series(&text, "E").unwrap();
        assert_eq!(series.len(), 4);
        assert_eq!(series[1].1, 0.5);
        std::fs::remove_file(&path).unwrap();
    }

    #[test]
    fn malformed_csv_is_rejected() {
        assert!(read_ledger_csv("").is_err());
        assert!(read_ledger_csv("a,b\n1,2\n").is_err());
        let ok_header = LEDGER_HEADER.join(",");
        assert!(read_ledger_csv(&format!("{ok_header}\n1,2\n")).is_err());
        assert!(read_ledger_csv(&format!("{ok_header}\n1,2,3,4,5,6,7,8,9,10,zz\n")).is_err());
        assert!(read_series("t,E\nnot,numbers\n", "E").is_err());
    }
}
