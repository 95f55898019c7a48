//! Dense square matrices over a prime field.

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat {
    pub d: usize,
    /// Row-major entries in `0..p`.
    pub a: Vec<u64>,
}

pub fn inv_mod(x: u64, p: u64) -> Option<u64> {
    if x.is_multiple_of(p) {
        return None;
    }
    // Fermat; p is prime
    let mut base = x % p;
    let mut e = p - 2;
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    Some(acc)
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|k| k * k <= p).all(|k| !p.is_multiple_of(k))
}

impl Mat {
    pub fn zero(d: usize) -> Self {
        Mat { d, a: vec![0; d * d] }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = Self::zero(d);
        for i in 0..d {
            m.a[i * d + i] = 1;
        }
        m
    }

    /// The `k`-th matrix in lexicographic order of entries.
    pub fn from_index(d: usize, p: u64, mut k: u64) -> Self {
        let mut m = Self::zero(d);
        for x in m.a.iter_mut().rev() {
            *x = k % p;
            k /= p;
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.a[i * self.d + j]
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|&x| x == 0)
    }

    pub fn mul(&self, o: &Mat, p: u64) -> Mat {
        let d = self.d;
        let mut out = Mat::zero(d);
        for i in 0..d {
            for k in 0..d {
                let x = self.a[i * d + k];
                if x == 0 {
                    continue;
                }
                for j in 0..d {
                    out.a[i * d + j] = (out.a[i * d + j] + x * o.a[k * d + j]) % p;
                }
            }
        }
        out
    }

    pub fn add_scaled(&mut self, o: &Mat, c: u64, p: u64) {
        for (x, y) in self.a.iter_mut().zip(&o.a) {
            *x = (*x + c * y) % p;
        }
    }

    pub fn trace(&self, p: u64) -> u64 {
        (0..self.d).fold(0, |s, i| (s + self.a[i * self.d + i]) % p)
    }

    pub fn transpose(&self) -> Mat {
        let d = self.d;
        let mut out = Mat::zero(d);
        for i in 0..d {
            for j in 0..d {
                out.a[j * d + i] = self.a[i * d + j];
            }
        }
        out
    }

    /// Determinant by elimination.
    pub fn det(&self, p: u64) -> u64 {
        let d = self.d;
        let mut m = self.a.clone();
        let mut det = 1u64;
        for c in 0..d {
            let Some(r) = (c..d).find(|&r| m[r * d + c] != 0) else { return 0 };
            if r != c {
                for j in 0..d {
                    m.swap(r * d + j, c * d + j);
                }
                det = (p - det) % p;
            }
            let pivot = m[c * d + c];
            det = det * pivot % p;
            let inv = inv_mod(pivot, p).expect("nonzero pivot");
            for r2 in c + 1..d {
                let f = m[r2 * d + c] * inv % p;
                if f == 0 {
                    continue;
                }
                for j in c..d {
                    m[r2 * d + j] = (m[r2 * d + j] + p - f * m[c * d + j] % p) % p;
                }
            }
        }
        det
    }

    /// Gauss–Jordan inverse.
    pub fn inverse(&self, p: u64) -> Option<Mat> {
        let d = self.d;
        let mut m = self.a.clone();
        let mut inv = Mat::identity(d).a;
        for c in 0..d {
            let r = (c..d).find(|&r| m[r * d + c] != 0)?;
            for j in 0..d {
                m.swap(r * d + j, c * d + j);
                inv.swap(r * d + j, c * d + j);
            }
            let s = inv_mod(m[c * d + c], p)?;
            for j in 0..d {
                m[c * d + j] = m[c * d + j] * s % p;
                inv[c * d + j] = inv[c * d + j] * s % p;
            }
            for r2 in 0..d {
                if r2 == c || m[r2 * d + c] == 0 {
                    continue;
                }
                let f = m[r2 * d + c];
                for j in 0..d {
                    m[r2 * d + j] = (m[r2 * d + j] + p - f * m[c * d + j] % p) % p;
                    inv[r2 * d + j] = (inv[r2 * d + j] + p - f * inv[c * d + j] % p) % p;
                }
            }
        }
        Some(Mat { d, a: inv })
    }
}
