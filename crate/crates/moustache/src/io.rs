//! File formats. Floats are written like C's `%.17g`, enough digits for
//! every double to parse back to the same bits.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use moustache_core::{CycleLawParams, CyclePool, CycleRecord, RenewalSequence, TrajectoryGrid};
use serde::Serialize;

use crate::error::{AppError, AppResult};

pub const POOL_HEADER: [&str; 8] = ["H", "T", "A", "B", "U", "V", "k", "err_bound"];
pub const RENEWAL_HEADER: [&str; 6] = ["i", "U", "lnTp", "lnA", "lnT", "S"];
pub const TRAJECTORY_HEADER: [&str; 2] = ["time", "value"];

/// `x` formatted as by `printf("%.17g", x)`.
pub fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.into();
    }
    // 17 correctly rounded significant digits, then %g's layout rules.
    let sci = format!("{:.16e}", x.abs());
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let sign = if x < 0.0 { "-" } else { "" };
    if !(-4..17).contains(&exp) {
        let frac = digits[1..].trim_end_matches('0');
        let dot = if frac.is_empty() { "" } else { "." };
        let esign = if exp < 0 { '-' } else { '+' };
        return format!("{sign}{}{dot}{frac}e{esign}{:02}", &digits[..1], exp.abs());
    }
    let (int, frac) = if exp >= 0 {
        let split = exp as usize + 1;
        (digits[..split].to_owned(), digits[split..].to_owned())
    } else {
        ("0".to_owned(), "0".repeat((-exp - 1) as usize) + &digits)
    };
    let frac = frac.trim_end_matches('0');
    if frac.is_empty() {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

/// Buffered writer on `path`, or on stdout for `None`.
pub fn open_output(path: Option<&Path>) -> AppResult<Box<dyn Write>> {
    match path {
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))?;
            }
            let f = File::create(p).map_err(|e| AppError::io(p, e))?;
            Ok(Box::new(BufWriter::new(f)))
        }
    }
}

fn csv_err(e: csv::Error) -> io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => e,
        other => io::Error::other(format!("{other:?}")),
    }
}

fn write_rows<W: Write, const N: usize>(
    w: W,
    header: [&str; N],
    rows: impl Iterator<Item = [String; N]>,
) -> io::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header).map_err(csv_err)?;
    for row in rows {
        out.write_record(&row).map_err(csv_err)?;
    }
    out.flush()
}

/// Pool CSV: a `#` line carrying `r`, `k` and the integrator fingerprint,
/// then one row per cycle.
pub fn write_pool_csv<W: Write>(mut w: W, pool: &CyclePool) -> io::Result<()> {
    writeln!(
        w,
        "# r={} k={} cfg={:016x}",
        fmt_g17(pool.params().r()),
        pool.k(),
        pool.cfg_fingerprint()
    )?;
    let rows = pool.records().iter().map(|c| {
        [
            fmt_g17(c.h),
            fmt_g17(c.t),
            fmt_g17(c.a),
            fmt_g17(c.b),
            fmt_g17(c.u),
            fmt_g17(c.v),
            c.k.to_string(),
            fmt_g17(c.err_bound),
        ]
    });
    write_rows(w, POOL_HEADER, rows)
}

struct PoolMeta {
    r: f64,
    k: Option<u32>,
    fingerprint: u64,
}

fn parse_meta(line: &str) -> Result<PoolMeta, String> {
    let mut meta = PoolMeta { r: f64::NAN, k: None, fingerprint: 0 };
    for field in line.trim_start_matches('#').split_whitespace() {
        let Some((key, value)) = field.split_once('=') else { continue };
        let bad = || format!("bad metadata field {field:?}");
        match key {
            "r" => meta.r = value.parse().map_err(|_| bad())?,
            "k" => meta.k = Some(value.parse().map_err(|_| bad())?),
            "cfg" => meta.fingerprint = u64::from_str_radix(value, 16).map_err(|_| bad())?,
            _ => {}
        }
    }
    Ok(meta)
}

/// Parses a pool written by [`write_pool_csv`]. `r_fallback` is used when
/// the metadata line is missing.
pub fn read_pool_csv<R: Read>(mut input: R, r_fallback: f64, source: &Path) -> AppResult<CyclePool> {
    let parse_err = |msg: String| AppError::Parse { path: source.to_owned(), msg };
    let mut text = String::new();
    input.read_to_string(&mut text).map_err(|e| AppError::io(source, e))?;
    let meta = match text.lines().next() {
        Some(first) if first.starts_with('#') => parse_meta(first).map_err(parse_err)?,
        _ => PoolMeta { r: r_fallback, k: None, fingerprint: 0 },
    };
    let params = CycleLawParams::new(meta.r).map_err(|e| parse_err(format!("r: {e}")))?;
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| parse_err(e.to_string()))?;
    if header.iter().ne(POOL_HEADER) {
        return Err(parse_err(format!("expected header {}", POOL_HEADER.join(","))));
    }
    let mut records = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| parse_err(e.to_string()))?;
        let line = i + 2;
        let num = |j: usize| -> AppResult<f64> {
            row[j].parse().map_err(|_| parse_err(format!("row {line}: {} = {:?} is not a number", POOL_HEADER[j], &row[j])))
        };
        let k: u32 = row[6].parse().map_err(|_| parse_err(format!("row {line}: bad k {:?}", &row[6])))?;
        let rec = CycleRecord::from_parts(&params, num(0)?, num(1)?, num(2)?, num(3)?, k)
            .map_err(|e| parse_err(format!("row {line}: {e}")))?;
        records.push(rec);
    }
    let k = meta
        .k
        .or_else(|| records.first().map(|c| c.k))
        .ok_or_else(|| parse_err("empty pool without metadata".into()))?;
    CyclePool::new(records, params, k, meta.fingerprint).map_err(|e| parse_err(e.to_string()))
}

pub fn read_pool_file(path: &Path, r_fallback: f64) -> AppResult<CyclePool> {
    let f = File::open(path).map_err(|e| AppError::io(path, e))?;
    read_pool_csv(f, r_fallback, path)
}

/// Renewal CSV, `i` counted from 1.
pub fn write_renewal_csv<W: Write>(w: W, seq: &RenewalSequence) -> io::Result<()> {
    let rows = (0..seq.len()).map(|i| {
        [
            (i + 1).to_string(),
            fmt_g17(seq.u[i]),
            fmt_g17(seq.ln_tp[i]),
            fmt_g17(seq.ln_a[i]),
            fmt_g17(seq.ln_t[i]),
            fmt_g17(seq.ln_s[i].exp()),
        ]
    });
    write_rows(w, RENEWAL_HEADER, rows)
}

pub fn write_trajectory_csv<W: Write>(w: W, path: &TrajectoryGrid) -> io::Result<()> {
    let rows = path.times().iter().zip(path.values()).map(|(&t, &v)| [fmt_g17(t), fmt_g17(v)]);
    write_rows(w, TRAJECTORY_HEADER, rows)
}

/// A generic table: header plus rows of floats.
pub fn write_table_csv<W: Write>(w: W, header: &[&str], rows: &[Vec<f64>]) -> io::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header).map_err(csv_err)?;
    for row in rows {
        out.write_record(row.iter().map(|&x| fmt_g17(x))).map_err(csv_err)?;
    }
    out.flush()
}

/// Pretty JSON followed by a newline.
pub fn write_json<W: Write, T: Serialize + ?Sized>(mut w: W, value: &T) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use moustache_core::regeneration::{assemble_renewal, CycleDraw, FromFn};
    use moustache_core::rng::task_rng;
    use rand::Rng;

    /// `printf("%.17g")` output from the C library.
    const PRINTF_G17: &[(u64, &str)] = &[
        (0x0000000000000000, "0"),
        (0x8000000000000000, "-0"),
        (0x3ff0000000000000, "1"),
        (0xbff0000000000000, "-1"),
        (0x3fb999999999999a, "0.10000000000000001"),
        (0x3fd5555555555555, "0.33333333333333331"),
        (0x0000000000000001, "4.9406564584124654e-324"),
        (0x0010000000000000, "2.2250738585072014e-308"),
        (0x7fefffffffffffff, "1.7976931348623157e+308"),
        (0x4341c37937e08000, "10000000000000000"),
        (0x4376345785d8a000, "1e+17"),
        (0x437b69b4ba630f35, "1.2345678901234568e+17"),
        (0x3f1a36e2eb1c432d, "0.0001"),
        (0x3ee4f8b588e368f1, "1.0000000000000001e-05"),
        (0xbefa36e2eb1c432d, "-2.5000000000000001e-05"),
        (0x400921fb54442d18, "3.1415926535897931"),
        (0x4376345785d89fff, "99999999999999984"),
        (0x3fefffffffffffff, "0.99999999999999989"),
        (0x4059000000000000, "100"),
        (0x01a56e1fc2f8f359, "1e-300"),
        (0x44dfe185ca57c517, "6.0221407599999999e+23"),
        (0xc01e000000000000, "-7.5"),
        (0x3fd3333333333334, "0.30000000000000004"),
        (0x40c81cd6c8b43958, "12345.678"),
    ];

    #[test]
    fn matches_printf() {
        for &(bits, want) in PRINTF_G17 {
            assert_eq!(fmt_g17(f64::from_bits(bits)), want, "bits {bits:#018x}");
        }
        assert_eq!(fmt_g17(f64::NAN), "nan");
        assert_eq!(fmt_g17(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn parses_back_bit_exact() {
        let mut rng = task_rng(3, 0);
        for _ in 0..20_000 {
            let x = f64::from_bits(rng.random::<u64>());
            if x.is_finite() {
                assert_eq!(fmt_g17(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
            }
        }
    }

    fn synthetic_pool() -> CyclePool {
        let p = CycleLawParams::new(2.0).unwrap();
        let mut rng = task_rng(9, 0);
        let recs = (0..50)
            .map(|_| {
                let h: f64 = rng.random_range(0.1..5.0);
                let a = 1.0 + rng.random::<f64>();
                CycleRecord::from_parts(&p, h, h * (1.0 + rng.random::<f64>()), a, 2.0 + 10.0 * rng.random::<f64>(), 30).unwrap()
            })
            .collect();
        CyclePool::new(recs, p, 30, 0xdead_beef).unwrap()
    }

    #[test]
    fn pool_round_trip_is_lossless() {
        let pool = synthetic_pool();
        let mut buf = Vec::new();
        write_pool_csv(&mut buf, &pool).unwrap();
        let back = read_pool_csv(buf.as_slice(), f64::NAN, Path::new("mem")).unwrap();
        assert_eq!(back, pool);
    }

    #[test]
    fn pool_without_metadata_uses_fallback() {
        let pool = synthetic_pool();
        let mut buf = Vec::new();
        write_pool_csv(&mut buf, &pool).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let body = text.split_once('\n').unwrap().1;
        let back = read_pool_csv(body.as_bytes(), 2.0, Path::new("mem")).unwrap();
        assert_eq!(back.records(), pool.records());
        assert_eq!(back.k(), 30);
    }

    #[test]
    fn malformed_pools_are_rejected() {
        let p = Path::new("mem");
        for text in [
            "# r=2 k=30 cfg=0\nH,T,A\n1,2,1.5\n",
            "# r=2 k=30 cfg=0\nH,T,A,B,U,V,k,err_bound\n1,2,x,3,0.5,1.5,30,0.01\n",
            "# r=2 k=30 cfg=0\nH,T,A,B,U,V,k,err_bound\n1,2,2.5,3,0.5,1.5,30,0.01\n",
            "# r=0.5 k=30 cfg=0\nH,T,A,B,U,V,k,err_bound\n",
        ] {
            let e = read_pool_csv(text.as_bytes(), 2.0, p).unwrap_err();
            assert_eq!(e.exit_code(), 3, "{text}");
        }
    }

    #[test]
    fn renewal_rows() {
        let p = CycleLawParams::new(2.0).unwrap();
        let mut src = FromFn::new(&p, |_| CycleDraw { u: 0.5, ln_tp: 0.0 });
        let seq = assemble_renewal(&mut src, 3, &mut task_rng(0, 0)).unwrap();
        let mut buf = Vec::new();
        write_renewal_csv(&mut buf, &seq).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "i,U,lnTp,lnA,lnT,S");
        assert_eq!(lines.len(), 4);
        // S_1 = T'_1 r^{-2U} = 1/2.
        assert!(lines[1].starts_with("1,0.5,0,"), "{}", lines[1]);
        assert!(lines[1].ends_with(",0.5"), "{}", lines[1]);
    }
}
