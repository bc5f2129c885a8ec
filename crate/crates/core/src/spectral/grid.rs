use crate::error::FieldError;

/// Resolution of the truncated mode lattice `|k|_inf <= n_modes` on the unit
/// torus, together with the padded physical grid used for nonlinear products.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridSpec {
    n_modes: usize,
    n_phys: usize,
}

impl GridSpec {
    /// Grid for `n_modes` with the default dealiasing padding.
    pub fn new(n_modes: usize) -> Result<Self, FieldError> {
        if n_modes == 0 {
            return Err(FieldError::InvalidGrid("n_modes must be at least 1".into()));
        }
        Ok(Self { n_modes, n_phys: padded_size(n_modes) })
    }

    /// Grid with an explicit physical size. `n_phys` must be at least `3 * n_modes + 1`
    /// so that quadratic products are alias-free on the retained modes.
    pub fn with_phys(n_modes: usize, n_phys: usize) -> Result<Self, FieldError> {
        if n_modes == 0 {
            return Err(FieldError::InvalidGrid("n_modes must be at least 1".into()));
        }
        if n_phys <= 3 * n_modes {
            return Err(FieldError::InvalidGrid(format!(
                "n_phys = {n_phys} does not exceed 3 * n_modes = {}",
                3 * n_modes
            )));
        }
        Ok(Self { n_modes, n_phys })
    }

    #[inline]
    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    #[inline]
    pub fn n_phys(&self) -> usize {
        self.n_phys
    }

    /// Number of modes per lattice axis, `2N + 1`.
    #[inline]
    pub fn side(&self) -> usize {
        2 * self.n_modes + 1
    }

    /// Number of lattice modes per component.
    #[inline]
    pub fn len(&self) -> usize {
        self.side() * self.side()
    }

    /// Flat index of mode `(k1, k2)`; row-major over `k1`, then `k2`.
    #[inline]
    pub fn index(&self, k1: i64, k2: i64) -> usize {
        let n = self.n_modes as i64;
        debug_assert!(k1.abs() <= n && k2.abs() <= n);
        ((k1 + n) as usize) * self.side() + (k2 + n) as usize
    }

    /// Mode `(k1, k2)` at flat index `idx`.
    #[inline]
    pub fn mode(&self, idx: usize) -> (i64, i64) {
        let n = self.n_modes as i64;
        let s = self.side();
        ((idx / s) as i64 - n, (idx % s) as i64 - n)
    }

    /// Flat index of `-k` given the flat index of `k`.
    #[inline]
    pub fn conjugate_index(&self, idx: usize) -> usize {
        self.len() - 1 - idx
    }

    pub fn contains(&self, k1: i64, k2: i64) -> bool {
        let n = self.n_modes as i64;
        k1.abs() <= n && k2.abs() <= n
    }

    /// Iterator over all lattice modes in storage order.
    pub fn modes(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        let n = self.n_modes as i64;
        (-n..=n).flat_map(move |k1| (-n..=n).map(move |k2| (k1, k2)))
    }

    /// Physical grid spacing.
    pub fn dx(&self) -> f64 {
        1.0 / self.n_phys as f64
    }
}

/// Smallest even 5-smooth integer strictly greater than `3 * n_modes`.
pub fn padded_size(n_modes: usize) -> usize {
    let mut m = 3 * n_modes + 1;
    loop {
        if m % 2 == 0 && is_smooth(m) {
            return m;
        }
        m += 1;
    }
}

fn is_smooth(mut m: usize) -> bool {
    for p in [2, 3, 5] {
        while m % p == 0 {
            m /= p;
        }
    }
    m == 1
}
