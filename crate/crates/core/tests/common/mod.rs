#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use pdeinpaint::{pnm, ImageGrid, Mask};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn data_path(name: &str) -> String {
    format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"))
}

pub fn lena() -> ImageGrid {
    pnm::read_pnm(data_path("lena256.pgm")).unwrap()
}

/// 64x64 crop around the face.
pub fn lena_crop() -> ImageGrid {
    lena().crop(96, 96, 64, 64).unwrap()
}

/// Dense solve of `reaction u - coeff Lap u = rhs` off the mask, `u = data` on it,
/// with the Neumann Laplacian `sum over in-grid neighbours (u_j - u_i)`.
pub fn dense_solve(reaction: f64, coeff: f64, mask: &Mask, rhs: &ImageGrid, data: &ImageGrid) -> ImageGrid {
    let (w, h) = rhs.shape();
    let n = w * h;
    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut b = DVector::<f64>::zeros(n);
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if mask.contains(i) {
                a[(i, i)] = 1.0;
                b[i] = data.data()[i];
                continue;
            }
            a[(i, i)] = reaction;
            b[i] = rhs.data()[i];
            let nbs = [
                (x > 0).then(|| i - 1),
                (x + 1 < w).then(|| i + 1),
                (y > 0).then(|| i - w),
                (y + 1 < h).then(|| i + w),
            ];
            for j in nbs.into_iter().flatten() {
                a[(i, i)] += coeff;
                a[(i, j)] -= coeff;
            }
        }
    }
    let u = a.lu().solve(&b).expect("nonsingular system");
    ImageGrid::new(w, h, u.iter().copied().collect()).unwrap()
}

pub fn max_diff(a: &ImageGrid, b: &ImageGrid) -> f64 {
    a.data().iter().zip(b.data()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn random_grid(rng: &mut ChaCha8Rng, w: usize, h: usize) -> ImageGrid {
    ImageGrid::from_fn(w, h, |_, _| rng.gen::<f64>()).unwrap()
}

pub fn random_mask(rng: &mut ChaCha8Rng, w: usize, h: usize, p: f64) -> Mask {
    Mask::from_bits(w, h, (0..w * h).map(|_| rng.gen_bool(p)).collect()).unwrap()
}
