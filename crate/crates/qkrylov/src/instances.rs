//! Seeded test-instance generators: matrices with prescribed spectra, random
//! states, and random graphs. Shared by the CLI generator and the test suites
//! so every experiment is reproducible from a single 64-bit seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{c, cr, ComplexMatrix, Vector, C64};

/// Dense random Hermitian matrix with entries of order one.
pub fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let raw = ComplexMatrix::from_fn(n, n, |_, _| {
        c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    });
    raw.add(&raw.adjoint()).expect("square").scaled(cr(0.5))
}

/// Random real symmetric matrix with entries of order one.
pub fn random_symmetric(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let raw = ComplexMatrix::from_fn(n, n, |_, _| cr(rng.random::<f64>() - 0.5));
    raw.add(&raw.adjoint()).expect("square").scaled(cr(0.5))
}

/// Haar-ish random unitary via Gram-Schmidt of a Gaussian-free complex matrix.
/// Plenty random for conjugating spectra; no Haar-exactness is claimed.
pub fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let cols = random_orthonormal_set(n, n, rng);
    ComplexMatrix::from_fn(n, n, |i, j| cols[j].get(i))
}

/// Random real orthogonal matrix (Gram-Schmidt of a random real matrix).
pub fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let mut cols: Vec<Vector> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v = Vector::new((0..n).map(|_| cr(rng.random::<f64>() - 0.5)).collect());
        for u in &cols {
            let g = u.inner(&v);
            v.axpy(-g, u);
        }
        if v.norm() > 1e-8 {
            cols.push(v.normalized().expect("norm checked"));
        }
    }
    ComplexMatrix::from_fn(n, n, |i, j| cols[j].get(i))
}

/// `count` orthonormal complex vectors of the given dimension.
pub fn random_orthonormal_set(dim: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vector> {
    assert!(count <= dim, "cannot fit {count} orthonormal vectors in dim {dim}");
    let mut cols: Vec<Vector> = Vec::with_capacity(count);
    while cols.len() < count {
        let mut v = Vector::new(
            (0..dim)
                .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect(),
        );
        for u in &cols {
            let g = u.inner(&v);
            v.axpy(-g, u);
        }
        if v.norm() > 1e-8 {
            cols.push(v.normalized().expect("norm checked"));
        }
    }
    cols
}

/// Random unit vector with complex entries.
pub fn random_state(dim: usize, rng: &mut ChaCha8Rng) -> Vector {
    loop {
        let v = Vector::new(
            (0..dim)
                .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect(),
        );
        if v.norm() > 1e-6 {
            return v.normalized().expect("norm checked");
        }
    }
}

/// Random unit vector with real entries.
pub fn random_real_state(dim: usize, rng: &mut ChaCha8Rng) -> Vector {
    loop {
        let v = Vector::new((0..dim).map(|_| cr(rng.random::<f64>() - 0.5)).collect());
        if v.norm() > 1e-6 {
            return v.normalized().expect("norm checked");
        }
    }
}

/// Hermitian matrix with exactly the requested spectrum, obtained by
/// conjugating the diagonal with a random unitary.
pub fn hermitian_with_spectrum(spectrum: &[f64], rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let n = spectrum.len();
    let q = random_unitary(n, rng);
    conjugate_diagonal(&q, spectrum)
}

/// Real symmetric matrix with exactly the requested spectrum.
pub fn symmetric_with_spectrum(spectrum: &[f64], rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let n = spectrum.len();
    let q = random_orthogonal(n, rng);
    conjugate_diagonal(&q, spectrum)
}

fn conjugate_diagonal(q: &ComplexMatrix, spectrum: &[f64]) -> ComplexMatrix {
    let n = spectrum.len();
    let d = ComplexMatrix::diagonal(spectrum);
    let qd = q.matmul(&d).expect("square");
    let m = qd.matmul(&q.adjoint()).expect("square");
    // Symmetrize away rounding so the Hermitian flag is set.
    m.add(&m.adjoint()).expect("square").scaled(cr(0.5))
}

/// Spectrum of `n` values in [1/kappa, 1] with the endpoints pinned, so the
/// condition number is exactly `kappa`.
pub fn spectrum_in_band(n: usize, kappa: f64, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    if n < 2 || kappa < 1.0 {
        return Err(Error::ParamInvalid(format!(
            "need n >= 2 and kappa >= 1, got n = {n}, kappa = {kappa}"
        )));
    }
    let lo = 1.0 / kappa;
    let mut s = vec![1.0, lo];
    for _ in 2..n {
        s.push(lo + rng.random::<f64>() * (1.0 - lo));
    }
    s.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    Ok(s)
}

/// SPD matrix (real symmetric) with singular values exactly in [1/kappa, 1].
pub fn spd_with_kappa(n: usize, kappa: f64, rng: &mut ChaCha8Rng) -> Result<ComplexMatrix> {
    let s = spectrum_in_band(n, kappa, rng)?;
    Ok(symmetric_with_spectrum(&s, rng))
}

/// Hermitian matrix with |spectrum| in [1/kappa, 1] and mixed signs.
pub fn hermitian_with_kappa(n: usize, kappa: f64, rng: &mut ChaCha8Rng) -> Result<ComplexMatrix> {
    let mut s = spectrum_in_band(n, kappa, rng)?;
    for (i, v) in s.iter_mut().enumerate() {
        if i % 2 == 1 {
            *v = -*v;
        }
    }
    Ok(hermitian_with_spectrum(&s, rng))
}

/// Hermitian contraction: spectral radius at most `rho_max` (default style
/// instance for the stationary iteration).
pub fn contraction(n: usize, rho_max: f64, rng: &mut ChaCha8Rng) -> Result<ComplexMatrix> {
    if !(0.0 < rho_max && rho_max < 1.0) {
        return Err(Error::ParamInvalid(format!(
            "contraction needs rho_max in (0,1), got {rho_max}"
        )));
    }
    let mut s: Vec<f64> = (0..n)
        .map(|_| (rng.random::<f64>() * 2.0 - 1.0) * rho_max)
        .collect();
    if let Some(first) = s.first_mut() {
        *first = rho_max; // pin the radius
    }
    s.sort_by(|a, b| b.abs().partial_cmp(&a.abs()).expect("finite"));
    Ok(hermitian_with_spectrum(&s, rng))
}

/// Erdos-Renyi random graph edge set on `n` vertices.
pub fn random_graph_edges(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    edges
}

/// Combinatorial Laplacian of a named graph family.
pub fn laplacian(family: &str, n: usize) -> Result<ComplexMatrix> {
    if n < 2 {
        return Err(Error::ParamInvalid(format!("laplacian needs n >= 2, got {n}")));
    }
    let edges: Vec<(usize, usize)> = match family {
        "cycle" => (0..n).map(|i| (i, (i + 1) % n)).collect(),
        "path" => (0..n - 1).map(|i| (i, i + 1)).collect(),
        "star" => (1..n).map(|i| (0, i)).collect(),
        "complete" => {
            let mut e = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    e.push((u, v));
                }
            }
            e
        }
        other => {
            return Err(Error::ParamInvalid(format!(
                "unknown laplacian family '{other}' (cycle|path|star|complete)"
            )))
        }
    };
    let mut entries = vec![C64::ZERO; n * n];
    for &(u, v) in &edges {
        entries[u * n + v] = cr(-1.0);
        entries[v * n + u] = cr(-1.0);
        entries[u * n + u] += cr(1.0);
        entries[v * n + v] += cr(1.0);
    }
    ComplexMatrix::new(n, n, entries)
}

/// Deterministic child stream for parallel or per-case seeding.
pub fn substream(seed: u64, tag: &str) -> ChaCha8Rng {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in tag.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    ChaCha8Rng::seed_from_u64(seed ^ h)
}
