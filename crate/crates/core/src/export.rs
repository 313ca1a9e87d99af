//! Text and image exports.
//!
//! Every CSV starts with a `# method=... ` comment line describing how it
//! was produced; frequency indices are written 1-based. Floats use Rust's
//! shortest round-trip formatting so identical values give identical bytes.

use std::io::Write;

use crate::error::Result;
use crate::sgft::SpectrogramMatrix;

pub fn write_spectrogram_csv<W: Write>(spec: &SpectrogramMatrix, mut out: W) -> Result<()> {
    writeln!(out, "# {}", spec.method())?;
    write!(out, "vertex")?;
    for k in 1..=spec.frequencies() {
        write!(out, ",{k}")?;
    }
    writeln!(out)?;
    for (r, v) in spec.vertices().iter().enumerate() {
        write!(out, "{v}")?;
        for x in spec.row(r) {
            write!(out, ",{x}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Two columns: vertex, 1-based dominant frequency.
pub fn write_dominant_csv<W: Write>(
    spec: &SpectrogramMatrix,
    dominant: &[usize],
    mut out: W,
) -> Result<()> {
    writeln!(out, "# {}", spec.method())?;
    writeln!(out, "vertex,dominant_frequency")?;
    for (v, k) in spec.vertices().iter().zip(dominant) {
        writeln!(out, "{v},{}", k + 1)?;
    }
    Ok(())
}

/// `vertex weight` lines, preceded by a comment header.
pub fn write_window<W: Write>(header: &str, values: &[f64], mut out: W) -> Result<()> {
    writeln!(out, "# {header}")?;
    for (i, w) in values.iter().enumerate() {
        writeln!(out, "{i} {w}")?;
    }
    Ok(())
}

/// `vertex,correlation[,x,y]`; undefined correlations are left empty.
pub fn write_correlation_csv<W: Write>(
    header: &str,
    vertices: &[usize],
    correlations: &[Option<f64>],
    coordinates: Option<&[[f64; 2]]>,
    mut out: W,
) -> Result<()> {
    writeln!(out, "# {header}")?;
    if coordinates.is_some() {
        writeln!(out, "vertex,correlation,x,y")?;
    } else {
        writeln!(out, "vertex,correlation")?;
    }
    for (&v, c) in vertices.iter().zip(correlations) {
        write!(out, "{v},")?;
        if let Some(c) = c {
            write!(out, "{c}")?;
        }
        if let Some(xy) = coordinates {
            write!(out, ",{},{}", xy[v][0], xy[v][1])?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Linear min/max scaling of a row-major matrix into bytes. A constant
/// matrix maps to all zeros.
pub fn to_gray(values: &[f64]) -> (Vec<u8>, f64, f64) {
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = max - min;
    let bytes = values
        .iter()
        .map(|&x| {
            if span > 0.0 {
                ((x - min) / span * 255.0).round().clamp(0.0, 255.0) as u8
            } else {
                0
            }
        })
        .collect();
    (bytes, min, max)
}

/// Binary PGM (P5). Returns the `(min, max)` used for scaling.
pub fn write_pgm<W: Write>(
    values: &[f64],
    rows: usize,
    cols: usize,
    mut out: W,
) -> Result<(f64, f64)> {
    assert_eq!(values.len(), rows * cols, "matrix shape");
    let (bytes, min, max) = to_gray(values);
    write!(out, "P5\n{cols} {rows}\n255\n")?;
    out.write_all(&bytes)?;
    Ok((min, max))
}

pub fn write_pgm_sidecar<W: Write>(
    min: f64,
    max: f64,
    rows: usize,
    cols: usize,
    mut out: W,
) -> Result<()> {
    writeln!(out, "min={min}")?;
    writeln!(out, "max={max}")?;
    writeln!(out, "rows={rows}")?;
    writeln!(out, "cols={cols}")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sgft::{Method, SpectrogramMatrix};

    fn tiny() -> SpectrogramMatrix {
        SpectrogramMatrix::from_rows(
            vec![0, 1],
            vec![vec![0.0, 2.0, 4.0], vec![1.0, 0.5, 0.25]],
            Method::Conv {
                tau: 5.0,
                frequencies: 3,
            },
        )
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_spectrogram_csv(&tiny(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "# method=conv tau=5 K=3\nvertex,1,2,3\n0,0,2,4\n1,1,0.5,0.25\n"
        );
        let mut buf = Vec::new();
        write_dominant_csv(&tiny(), &[2, 0], &mut buf).unwrap();
        assert!(String::from_utf8(buf)
            .unwrap()
            .ends_with("vertex,dominant_frequency\n0,3\n1,1\n"));
    }

    #[test]
    fn pgm_header_and_scaling() {
        let mut buf = Vec::new();
        let (min, max) = write_pgm(&[0.0, 2.0, 4.0, 1.0, 0.5, 0.25], 2, 3, &mut buf).unwrap();
        assert_eq!((min, max), (0.0, 4.0));
        let header = b"P5\n3 2\n255\n";
        assert_eq!(&buf[..header.len()], header);
        assert_eq!(&buf[header.len()..], &[0, 128, 255, 64, 32, 16]);
        let (flat, _, _) = to_gray(&[3.0, 3.0]);
        assert_eq!(flat, vec![0, 0]);
    }

    #[test]
    fn correlation_csv_leaves_missing_blank() {
        let mut buf = Vec::new();
        write_correlation_csv(
            "seed=1",
            &[0, 1],
            &[None, Some(1.0)],
            Some(&[[0.5, 1.5], [2.0, 3.0]]),
            &mut buf,
        )
        .unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "# seed=1\nvertex,correlation,x,y\n0,,0.5,1.5\n1,1,2,3\n"
        );
    }
}
