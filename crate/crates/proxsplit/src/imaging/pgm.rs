//! Image and matrix file I/O.
//!
//! PGM is supported in both binary (`P5`) and ASCII (`P2`) flavors, 8-bit and
//! 16-bit (16-bit binary samples are big-endian, following the format).
//! Full-precision intermediates travel as a raw matrix file: an 8-byte magic,
//! two little-endian `u32` dimensions, then row-major little-endian `f64`
//! samples.

use super::ImageGrid;
use std::fs;
use std::io::Write;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot access {path}: {source}")]
    File {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: not a PGM file (expected P2 or P5 magic)")]
    BadMagic { path: String },
    #[error("{path}: malformed PGM: {reason}")]
    BadPgm { path: String, reason: String },
    #[error("{path}: not a raw f64 matrix file")]
    BadMatrix { path: String },
}

fn file_err(path: &Path, source: std::io::Error) -> IoError {
    IoError::File {
        path: path.display().to_string(),
        source,
    }
}

/// PGM flavor selection for writing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PgmFormat {
    Binary8,
    Binary16,
    Ascii8,
    Ascii16,
}

/// Write an image as PGM, rounding and clamping samples to the format range.
pub fn write_pgm(path: &Path, img: &ImageGrid, format: PgmFormat) -> Result<(), IoError> {
    let (magic, maxval, ascii) = match format {
        PgmFormat::Binary8 => ("P5", 255u32, false),
        PgmFormat::Binary16 => ("P5", 65535, false),
        PgmFormat::Ascii8 => ("P2", 255, true),
        PgmFormat::Ascii16 => ("P2", 65535, true),
    };
    let mut buf: Vec<u8> = Vec::with_capacity(img.data.len() * 2 + 64);
    write!(buf, "{magic}\n{} {}\n{maxval}\n", img.width, img.height)
        .expect("in-memory write cannot fail");
    for &v in &img.data {
        let q = v.round().clamp(0.0, maxval as f64) as u32;
        if ascii {
            writeln!(buf, "{q}").expect("in-memory write cannot fail");
        } else if maxval > 255 {
            buf.extend_from_slice(&(q as u16).to_be_bytes());
        } else {
            buf.push(q as u8);
        }
    }
    write_atomic(path, &buf)
}

/// Read a PGM file (P2 or P5, maxval up to 65535) into floating samples.
pub fn read_pgm(path: &Path) -> Result<ImageGrid, IoError> {
    let raw = fs::read(path).map_err(|e| file_err(path, e))?;
    let pstr = path.display().to_string();
    let bad = |reason: &str| IoError::BadPgm {
        path: pstr.clone(),
        reason: reason.to_string(),
    };
    if raw.len() < 2 {
        return Err(IoError::BadMagic { path: pstr });
    }
    let ascii = match &raw[..2] {
        b"P2" => true,
        b"P5" => false,
        _ => return Err(IoError::BadMagic { path: pstr }),
    };
    // header: magic, width, height, maxval, with '#' comments allowed
    let mut pos = 2;
    let mut fields = [0usize; 3];
    let mut nfield = 0;
    while nfield < 3 {
        while pos < raw.len() && (raw[pos].is_ascii_whitespace() || raw[pos] == b'#') {
            if raw[pos] == b'#' {
                while pos < raw.len() && raw[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                pos += 1;
            }
        }
        let start = pos;
        while pos < raw.len() && raw[pos].is_ascii_digit() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        let text = std::str::from_utf8(&raw[start..pos]).expect("digits are utf8");
        fields[nfield] = text.parse().map_err(|_| bad("header field overflow"))?;
        nfield += 1;
    }
    let (width, height, maxval) = (fields[0], fields[1], fields[2]);
    if width == 0 || height == 0 {
        return Err(bad("zero dimension"));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(bad("maxval out of range"));
    }
    let n = width * height;
    let mut data = Vec::with_capacity(n);
    if ascii {
        let body = std::str::from_utf8(&raw[pos..]).map_err(|_| bad("non-ascii sample data"))?;
        for tok in body.split_ascii_whitespace().take(n) {
            let v: f64 = tok.parse().map_err(|_| bad("non-numeric sample"))?;
            data.push(v);
        }
    } else {
        pos += 1; // single whitespace after maxval
        if maxval > 255 {
            if raw.len() < pos + 2 * n {
                return Err(bad("truncated sample data"));
            }
            for i in 0..n {
                let hi = raw[pos + 2 * i] as u16;
                let lo = raw[pos + 2 * i + 1] as u16;
                data.push(((hi << 8) | lo) as f64);
            }
        } else {
            if raw.len() < pos + n {
                return Err(bad("truncated sample data"));
            }
            data.extend(raw[pos..pos + n].iter().map(|&b| b as f64));
        }
    }
    if data.len() != n {
        return Err(bad("truncated sample data"));
    }
    Ok(ImageGrid {
        width,
        height,
        data,
    })
}

const MATRIX_MAGIC: &[u8; 8] = b"PXSPLF64";

/// Write a full-precision matrix file.
pub fn write_matrix(path: &Path, img: &ImageGrid) -> Result<(), IoError> {
    let mut buf = Vec::with_capacity(16 + img.data.len() * 8);
    buf.extend_from_slice(MATRIX_MAGIC);
    buf.extend_from_slice(&(img.width as u32).to_le_bytes());
    buf.extend_from_slice(&(img.height as u32).to_le_bytes());
    for &v in &img.data {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    write_atomic(path, &buf)
}

/// Read a full-precision matrix file.
pub fn read_matrix(path: &Path) -> Result<ImageGrid, IoError> {
    let raw = fs::read(path).map_err(|e| file_err(path, e))?;
    let pstr = path.display().to_string();
    if raw.len() < 16 || &raw[..8] != MATRIX_MAGIC {
        return Err(IoError::BadMatrix { path: pstr });
    }
    let width = u32::from_le_bytes(raw[8..12].try_into().expect("4 bytes")) as usize;
    let height = u32::from_le_bytes(raw[12..16].try_into().expect("4 bytes")) as usize;
    let n = width * height;
    if raw.len() != 16 + 8 * n {
        return Err(IoError::BadMatrix { path: pstr });
    }
    let data: Vec<f64> = raw[16..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    Ok(ImageGrid {
        width,
        height,
        data,
    })
}

/// Write via a temporary file in the same directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), IoError> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let mut tmp = dir.to_path_buf();
    let name = path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    tmp.push(format!(".{name}.tmp"));
    fs::write(&tmp, bytes).map_err(|e| file_err(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| file_err(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_image() -> ImageGrid {
        ImageGrid {
            width: 4,
            height: 3,
            data: (0..12).map(|i| (i * 19 % 256) as f64).collect(),
        }
    }

    #[test]
    fn pgm_round_trip_all_formats() {
        let dir = tempfile::tempdir().unwrap();
        let img = sample_image();
        for (i, fmt) in [
            PgmFormat::Binary8,
            PgmFormat::Binary16,
            PgmFormat::Ascii8,
            PgmFormat::Ascii16,
        ]
        .iter()
        .enumerate()
        {
            let p = dir.path().join(format!("t{i}.pgm"));
            write_pgm(&p, &img, *fmt).unwrap();
            let back = read_pgm(&p).unwrap();
            assert_eq!(back.width, 4);
            assert_eq!(back.height, 3);
            assert_eq!(back.data, img.data, "{fmt:?}");
        }
    }

    #[test]
    fn pgm_clamps_out_of_range() {
        let dir = tempfile::tempdir().unwrap();
        let img = ImageGrid {
            width: 2,
            height: 1,
            data: vec![-5.0, 300.0],
        };
        let p = dir.path().join("c.pgm");
        write_pgm(&p, &img, PgmFormat::Binary8).unwrap();
        let back = read_pgm(&p).unwrap();
        assert_eq!(back.data, vec![0.0, 255.0]);
    }

    #[test]
    fn pgm_reads_comments() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.pgm");
        std::fs::write(&p, b"P2\n# a comment\n2 2\n255\n1 2\n3 4\n").unwrap();
        let img = read_pgm(&p).unwrap();
        assert_eq!(img.data, vec![1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn matrix_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let img = ImageGrid {
            width: 3,
            height: 2,
            data: vec![0.1, -7.25, 1e-300, 255.00000000000003, f64::MIN_POSITIVE, 0.0],
        };
        let p = dir.path().join("m.f64");
        write_matrix(&p, &img).unwrap();
        let back = read_matrix(&p).unwrap();
        assert_eq!(back.data, img.data);
        assert_eq!((back.width, back.height), (3, 2));
    }

    #[test]
    fn missing_file_reports_path() {
        let err = read_pgm(Path::new("/definitely/not/here.pgm")).unwrap_err();
        assert!(err.to_string().contains("/definitely/not/here.pgm"));
    }
}
