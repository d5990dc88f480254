//! Pixel grids, masks and the discrete differential operators shared by the
//! solvers and mask builders.
//!
//! All operators use unit pixel spacing and realize the homogeneous Neumann
//! condition with half-sample mirror ghost cells: the ghost value outside the
//! grid equals the adjacent in-grid value. The 5-point Laplacian therefore
//! reduces to `sum over in-grid neighbours (u_nb - u_c)`, which is a symmetric
//! graph Laplacian that annihilates constants and sums to zero over the grid.

use crate::error::{Error, Result};

/// Smallest admissible side length. The mirrored stencils are total on any
/// non-empty grid.
pub const MIN_SIDE: usize = 1;

/// A 2-D scalar field stored row-major. Nominal intensity range is `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageGrid {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl ImageGrid {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        check_dims(width, height)?;
        if data.len() != width * height {
            return Err(Error::InvalidImage(format!(
                "data length {} does not match {}x{}",
                data.len(),
                width,
                height
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn zeros(width: usize, height: usize) -> Result<Self> {
        Self::filled(width, height, 0.0)
    }

    /// Builds a grid from `f(x, y)` where `x` is the column and `y` the row.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        check_dims(width, height)?;
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        self.data[y * self.width + x] = v;
    }

    /// Returns a grid of the same shape with `f` applied to every value.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise combination of two equally shaped grids.
    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.ensure_same_shape(other.shape())?;
        Ok(Self {
            width: self.width,
            height: self.height,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn clamp01(&self) -> Self {
        self.map(|v| v.clamp(0.0, 1.0))
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Unnormalized Euclidean norm `sqrt(sum v_i^2)`.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Extracts the `w x h` block whose top-left corner is `(x0, y0)`.
    pub fn crop(&self, x0: usize, y0: usize, w: usize, h: usize) -> Result<Self> {
        if x0 + w > self.width || y0 + h > self.height {
            return Err(Error::InvalidParameter(format!(
                "crop {w}x{h}+{x0}+{y0} exceeds {}x{}",
                self.width, self.height
            )));
        }
        Self::from_fn(w, h, |x, y| self.get(x0 + x, y0 + y))
    }

    pub(crate) fn ensure_same_shape(&self, shape: (usize, usize)) -> Result<()> {
        if self.shape() != shape {
            return Err(Error::ShapeMismatch {
                expected: self.shape(),
                got: shape,
            });
        }
        Ok(())
    }
}

fn check_dims(width: usize, height: usize) -> Result<()> {
    if width < MIN_SIDE || height < MIN_SIDE {
        return Err(Error::InvalidImage(format!(
            "{width}x{height} is smaller than the minimum {MIN_SIDE}x{MIN_SIDE}"
        )));
    }
    Ok(())
}

/// A boolean pixel set: the stored pixels, used as Dirichlet data.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
    count: usize,
}

impl Mask {
    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width * height],
            count: 0,
        }
    }

    pub fn full(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: vec![true; width * height],
            count: width * height,
        }
    }

    pub fn from_bits(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != width * height {
            return Err(Error::InvalidParameter(format!(
                "mask has {} bits, expected {}",
                bits.len(),
                width * height
            )));
        }
        let count = bits.iter().filter(|&&b| b).count();
        Ok(Self {
            width,
            height,
            bits,
            count,
        })
    }

    /// Mask containing exactly the given row-major indices.
    pub fn from_indices(
        width: usize,
        height: usize,
        indices: impl IntoIterator<Item = usize>,
    ) -> Self {
        let mut mask = Self::empty(width, height);
        for i in indices {
            mask.insert(i);
        }
        mask
    }

    pub fn like(img: &ImageGrid) -> Self {
        Self::empty(img.width(), img.height())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.bits[i]
    }

    #[inline]
    pub fn contains_xy(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    pub fn insert(&mut self, i: usize) {
        if !self.bits[i] {
            self.bits[i] = true;
            self.count += 1;
        }
    }

    pub fn remove(&mut self, i: usize) {
        if self.bits[i] {
            self.bits[i] = false;
            self.count -= 1;
        }
    }

    /// Row-major indices of the selected pixels.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
    }

    pub fn union(&self, other: &Mask) -> Result<Mask> {
        self.ensure_same_shape(other.shape())?;
        let bits = self
            .bits
            .iter()
            .zip(&other.bits)
            .map(|(&a, &b)| a || b)
            .collect();
        Mask::from_bits(self.width, self.height, bits)
    }

    pub fn is_subset_of(&self, other: &Mask) -> bool {
        self.shape() == other.shape()
            && self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }

    /// Number of pixels where the two masks disagree.
    pub fn hamming(&self, other: &Mask) -> usize {
        self.bits
            .iter()
            .zip(&other.bits)
            .filter(|(a, b)| a != b)
            .count()
    }

    pub(crate) fn ensure_same_shape(&self, shape: (usize, usize)) -> Result<()> {
        if self.shape() != shape {
            return Err(Error::ShapeMismatch {
                expected: self.shape(),
                got: shape,
            });
        }
        Ok(())
    }
}

/// Forward differences of an image.
#[derive(Debug, Clone, PartialEq)]
pub struct GradPair {
    pub dx: ImageGrid,
    pub dy: ImageGrid,
}

/// 5-point Laplacian with mirrored (Neumann) boundary.
pub fn laplacian(img: &ImageGrid) -> ImageGrid {
    let (w, h) = img.shape();
    let u = img.data();
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let c = u[i];
            let mut acc = 0.0;
            if x > 0 {
                acc += u[i - 1] - c;
            }
            if x + 1 < w {
                acc += u[i + 1] - c;
            }
            if y > 0 {
                acc += u[i - w] - c;
            }
            if y + 1 < h {
                acc += u[i + w] - c;
            }
            out[i] = acc;
        }
    }
    ImageGrid {
        width: w,
        height: h,
        data: out,
    }
}

/// Forward differences; the last column of `dx` and last row of `dy` are zero.
pub fn gradient(img: &ImageGrid) -> GradPair {
    let (w, h) = img.shape();
    let dx = ImageGrid::from_fn(w, h, |x, y| {
        if x + 1 < w {
            img.get(x + 1, y) - img.get(x, y)
        } else {
            0.0
        }
    })
    .expect("shape already validated");
    let dy = ImageGrid::from_fn(w, h, |x, y| {
        if y + 1 < h {
            img.get(x, y + 1) - img.get(x, y)
        } else {
            0.0
        }
    })
    .expect("shape already validated");
    GradPair { dx, dy }
}

/// Normalized 1-D Gaussian kernel with radius `ceil(3 sigma)`.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil().max(1.0) as usize;
    let mut k: Vec<f64> = (0..=2 * radius)
        .map(|i| {
            let t = i as f64 - radius as f64;
            (-t * t / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let s: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= s);
    k
}

/// Half-sample symmetric reflection of an index into `[0, n)`.
#[inline]
pub(crate) fn reflect(i: isize, n: usize) -> usize {
    let n = n as isize;
    let period = 2 * n;
    let mut j = i.rem_euclid(period);
    if j >= n {
        j = period - 1 - j;
    }
    j as usize
}

/// Separable Gaussian convolution with mirror boundary.
///
/// Panics if `sigma` is not strictly positive.
pub fn gaussian_blur(img: &ImageGrid, sigma: f64) -> ImageGrid {
    assert!(sigma > 0.0, "gaussian_blur needs sigma > 0, got {sigma}");
    let kernel = gaussian_kernel(sigma);
    let r = (kernel.len() / 2) as isize;
    let (w, h) = img.shape();
    let src = img.data();

    let mut tmp = vec![0.0; w * h];
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        for x in 0..w {
            let mut acc = 0.0;
            for (k, &wk) in kernel.iter().enumerate() {
                acc += wk * row[reflect(x as isize + k as isize - r, w)];
            }
            tmp[y * w + x] = acc;
        }
    }

    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (k, &wk) in kernel.iter().enumerate() {
                acc += wk * tmp[reflect(y as isize + k as isize - r, h) * w + x];
            }
            out[y * w + x] = acc;
        }
    }
    ImageGrid {
        width: w,
        height: h,
        data: out,
    }
}
