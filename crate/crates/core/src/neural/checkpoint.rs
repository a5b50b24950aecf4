//! Plain-text network files.
//!
//! ```text
//! 2,64,64,1 sigmoid
//! <layer 0 weights, row-major, comma separated>
//! <layer 0 biases>
//! ...
//! ```
//!
//! Values are written with 17 significant digits, which round-trips every
//! finite `f64` exactly.

use std::io::{BufRead, Write};
use std::path::Path;

use super::{Head, Mlp, NeuralError};

fn write_row<W: Write>(out: &mut W, xs: &[f64]) -> std::io::Result<()> {
    let mut first = true;
    for x in xs {
        if !first {
            out.write_all(b",")?;
        }
        first = false;
        write!(out, "{x:.16e}")?;
    }
    out.write_all(b"\n")
}

pub fn write_checkpoint<W: Write>(net: &Mlp, mut out: W) -> std::io::Result<()> {
    let dims: Vec<String> = net.dims().iter().map(usize::to_string).collect();
    writeln!(out, "{} {}", dims.join(","), net.head())?;
    for (w, b) in net.weights.iter().zip(&net.biases) {
        write_row(&mut out, w)?;
        write_row(&mut out, b)?;
    }
    Ok(())
}

fn bad(line: usize, msg: impl Into<String>) -> NeuralError {
    NeuralError::Checkpoint {
        line,
        msg: msg.into(),
    }
}

pub fn read_checkpoint<R: BufRead>(input: R) -> Result<Mlp, NeuralError> {
    let mut lines = input.lines().enumerate();
    let mut next = |what: &str| -> Result<(usize, String), NeuralError> {
        match lines.next() {
            Some((i, Ok(l))) => Ok((i + 1, l)),
            Some((i, Err(e))) => Err(bad(i + 1, e.to_string())),
            None => Err(bad(0, format!("missing {what}"))),
        }
    };
    let (n, header) = next("header")?;
    let (dims, head) = header
        .split_once(' ')
        .ok_or_else(|| bad(n, "expected `<dims> <head>`"))?;
    let dims: Vec<usize> = dims
        .split(',')
        .map(|d| d.trim().parse().map_err(|_| bad(n, format!("bad dimension `{d}`"))))
        .collect::<Result<_, _>>()?;
    let head: Head = head.trim().parse().map_err(|e: String| bad(n, e))?;
    let mut net = Mlp::zeros(&dims, head)?;
    for l in 0..net.num_layers() {
        for which in ["weights", "biases"] {
            let (n, row) = next(which)?;
            let target = if which == "weights" {
                &mut net.weights[l]
            } else {
                &mut net.biases[l]
            };
            let values: Vec<f64> = row
                .split(',')
                .map(|v| v.trim().parse().map_err(|_| bad(n, format!("bad number `{v}`"))))
                .collect::<Result<_, _>>()?;
            if values.len() != target.len() {
                return Err(bad(
                    n,
                    format!("layer {l} {which}: expected {} values, got {}", target.len(), values.len()),
                ));
            }
            *target = values;
        }
    }
    Ok(net)
}

pub fn save_checkpoint(net: &Mlp, path: &Path) -> std::io::Result<()> {
    let mut buf = Vec::new();
    write_checkpoint(net, &mut buf)?;
    std::fs::write(path, buf)
}

pub fn load_checkpoint(path: &Path) -> Result<Mlp, crate::Error> {
    let file = std::fs::File::open(path).map_err(|e| crate::Error::io(path, e))?;
    Ok(read_checkpoint(std::io::BufReader::new(file))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bit_exact_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut net = Mlp::init(&[2, 64, 64, 1], Head::Sigmoid, &mut rng).unwrap();
        for b in net.biases.iter_mut().flatten() {
            *b = rng.random_range(-1e-300..1e300);
        }
        net.weights[0][0] = f64::MIN_POSITIVE / 3.0;
        net.weights[0][1] = -0.0;
        let mut buf = Vec::new();
        write_checkpoint(&net, &mut buf).unwrap();
        let back = read_checkpoint(&buf[..]).unwrap();
        for (a, b) in net.params().zip(back.params()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert_eq!(back.head(), Head::Sigmoid);
        let mut again = Vec::new();
        write_checkpoint(&back, &mut again).unwrap();
        assert_eq!(buf, again);
    }

    #[test]
    fn header_line() {
        let net = Mlp::zeros(&[3, 4, 1], Head::Identity).unwrap();
        let mut buf = Vec::new();
        write_checkpoint(&net, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("3,4,1 identity\n"));
        assert_eq!(text.lines().count(), 5);
    }

    #[test]
    fn malformed_files() {
        assert!(read_checkpoint(&b""[..]).is_err());
        assert!(read_checkpoint(&b"2,1 tanh\n0,0\n0\n"[..]).is_err());
        assert!(read_checkpoint(&b"2,1 identity\n0\n0\n"[..]).is_err());
        assert!(read_checkpoint(&b"2,1 identity\n0,x\n0\n"[..]).is_err());
        assert!(read_checkpoint(&b"2,1 identity\n0,1\n"[..]).is_err());
        assert!(read_checkpoint(&b"2,1 identity\n0,1\n2\n"[..]).is_ok());
    }
}
