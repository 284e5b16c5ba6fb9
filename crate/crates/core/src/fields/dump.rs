//! Field dump files.
//!
//! Layout: one ASCII header line
//! `kornlab-field v1; rank=<r>; n=<n>; reality=<real|complex>` terminated by
//! `\n`, followed by `n³ · 3^r` coefficients in storage order (see the
//! [`super`] module docs), each written as two little-endian `f32`
//! (real, imaginary).

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::{slots_for_rank, GridField, GridSpec, Reality};
use crate::error::{Error, Result};

pub const DUMP_MAGIC: &str = "kornlab-field v1";

pub fn header_line(f: &GridField) -> String {
    format!(
        "{DUMP_MAGIC}; rank={}; n={}; reality={}",
        f.rank(),
        f.spec().n(),
        f.reality().as_str()
    )
}

pub fn write_dump(f: &GridField, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{}", header_line(f))?;
    for c in f.coefficients() {
        w.write_all(&(c.re as f32).to_le_bytes())?;
        w.write_all(&(c.im as f32).to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_dump(path: impl AsRef<Path>) -> Result<GridField> {
    let mut r = BufReader::new(File::open(path)?);
    let mut header = String::new();
    r.read_line(&mut header)?;
    let (rank, n, reality) = parse_header(header.trim_end_matches('\n'))?;
    let spec = GridSpec::new(n)?;
    let count = spec.len() * slots_for_rank(rank);
    let mut bytes = Vec::with_capacity(count * 8);
    r.read_to_end(&mut bytes)?;
    if bytes.len() != count * 8 {
        return Err(Error::BadDump(format!(
            "expected {} payload bytes, found {}",
            count * 8,
            bytes.len()
        )));
    }
    let coeffs = bytes
        .chunks_exact(8)
        .map(|b| {
            let re = f32::from_le_bytes([b[0], b[1], b[2], b[3]]);
            let im = f32::from_le_bytes([b[4], b[5], b[6], b[7]]);
            Complex64::new(re as f64, im as f64)
        })
        .collect();
    GridField::from_coefficients(spec, rank, reality, coeffs)
}

fn parse_header(line: &str) -> Result<(usize, usize, Reality)> {
    let bad = || Error::BadDump(format!("unrecognised header {line:?}"));
    let mut parts = line.split("; ");
    if parts.next() != Some(DUMP_MAGIC) {
        return Err(bad());
    }
    let mut field = |key: &str| -> Result<String> {
        let p = parts.next().ok_or_else(bad)?;
        p.strip_prefix(key)
            .and_then(|rest| rest.strip_prefix('='))
            .map(str::to_owned)
            .ok_or_else(bad)
    };
    let rank: usize = field("rank")?.parse().map_err(|_| bad())?;
    let n: usize = field("n")?.parse().map_err(|_| bad())?;
    let reality = match field("reality")?.as_str() {
        "real" => Reality::Real,
        "complex" => Reality::Complex,
        _ => return Err(bad()),
    };
    if rank > 2 {
        return Err(bad());
    }
    Ok((rank, n, reality))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{random_bandlimited, Structure};

    #[test]
    fn header_format() {
        let spec = GridSpec::new(8).unwrap();
        let f = GridField::zeros(spec, 2, Reality::Real);
        assert_eq!(
            header_line(&f),
            "kornlab-field v1; rank=2; n=8; reality=real"
        );
    }

    #[test]
    fn dump_roundtrip_at_single_precision() {
        let spec = GridSpec::new(8).unwrap();
        let f = random_bandlimited(spec, 4, 2, Structure::Sym).unwrap();
        let dir = tempdir();
        let path = dir.join("field.bin");
        write_dump(&f, &path).unwrap();
        let raw = std::fs::read(&path).unwrap();
        let header_len = header_line(&f).len() + 1;
        assert_eq!(raw.len(), header_len + 8 * 9 * 512);
        let g = read_dump(&path).unwrap();
        assert_eq!(g.rank(), 2);
        assert_eq!(g.reality(), Reality::Real);
        assert!(g.relative_distance(&f).unwrap() < 1e-6);
        std::fs::remove_dir_all(dir).ok();
    }

    #[test]
    fn rejects_bad_header() {
        let dir = tempdir();
        let path = dir.join("bad.bin");
        std::fs::write(&path, b"kornlab-field v2; rank=0; n=4; reality=real\n").unwrap();
        assert!(matches!(read_dump(&path), Err(Error::BadDump(_))));
        std::fs::write(&path, b"kornlab-field v1; rank=0; n=4; reality=real\n\0\0").unwrap();
        assert!(matches!(read_dump(&path), Err(Error::BadDump(_))));
        std::fs::remove_dir_all(dir).ok();
    }

    fn tempdir() -> std::path::PathBuf {
        let mut p = std::env::temp_dir();
        p.push(format!(
            "kornlab-dump-{}-{:?}",
            std::process::id(),
            std::thread::current().id()
        ));
        std::fs::create_dir_all(&p).unwrap();
        p
    }
}
