use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Amplitudes below this magnitude are dropped.
pub const PRUNE: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    pub fn index(self) -> usize {
        match self {
            Polarization::H => 0,
            Polarization::V => 1,
        }
    }
}

/// Spatial mode label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Spatial {
    /// Common source mode (SPDC output and, after overlap, the weak coherent beam).
    S,
    /// Weak coherent beam before it is overlapped with the source mode.
    W,
    /// Output port `a`, `b`, ... of the distribution network.
    Out(u8),
    /// Ancilla mode that receives photons removed by a loss channel.
    Loss(u16),
}

impl Spatial {
    pub fn is_detectable(self) -> bool {
        !matches!(self, Spatial::Loss(_))
    }

    /// Output port by letter (`'a'` is port 0).
    pub fn port(letter: char) -> Result<Self> {
        if letter.is_ascii_lowercase() && !matches!(letter, 's' | 'w') {
            Ok(Spatial::Out(letter as u8 - b'a'))
        } else {
            Err(Error::domain(format!("'{letter}' is not an output port label")))
        }
    }

    pub fn parse(label: &str) -> Result<Self> {
        match label {
            "s" => Ok(Spatial::S),
            "w" => Ok(Spatial::W),
            l if l.starts_with("loss") => l[4..]
                .parse::<u16>()
                .ok()
                .filter(|&k| k > 0)
                .map(|k| Spatial::Loss(k - 1))
                .ok_or_else(|| Error::domain(format!("bad loss-mode label '{label}'"))),
            l if l.chars().count() == 1 => Spatial::port(l.chars().next().unwrap_or('?')),
            other => Err(Error::domain(format!("unknown spatial mode '{other}'"))),
        }
    }
}

impl fmt::Display for Spatial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Spatial::S => write!(f, "s"),
            Spatial::W => write!(f, "w"),
            Spatial::Out(k) => write!(f, "{}", (b'a' + k) as char),
            Spatial::Loss(k) => write!(f, "loss{}", k + 1),
        }
    }
}

/// A bosonic mode: spatial path, polarization and a distinguishability tag
/// (photons with different tags never interfere).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeId {
    pub spatial: Spatial,
    pub pol: Polarization,
    pub tag: u8,
}

impl ModeId {
    pub fn new(spatial: Spatial, pol: Polarization) -> Self {
        Self { spatial, pol, tag: 0 }
    }

    pub fn tagged(spatial: Spatial, pol: Polarization, tag: u8) -> Self {
        Self { spatial, pol, tag }
    }
}

impl fmt::Display for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{:?}", self.spatial, self.pol)?;
        if self.tag != 0 {
            write!(f, "'{}", self.tag)?;
        }
        Ok(())
    }
}

/// Sparse superposition of multimode Fock states `Σ c_n |n_1, n_2, ...>`,
/// truncated at `n_max` photons in total.
///
/// Keys are occupation vectors aligned with `modes`, which is kept sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct FockExpansion {
    modes: Vec<ModeId>,
    terms: BTreeMap<Vec<u8>, Complex64>,
    n_max: usize,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn sqrt_factorials(occ: &[u8]) -> f64 {
    occ.iter().map(|&n| factorial(n as usize)).product::<f64>().sqrt()
}

impl FockExpansion {
    pub fn vacuum(n_max: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Vec::new(), Complex64::new(1.0, 0.0));
        Self { modes: Vec::new(), terms, n_max }
    }

    /// Builds an expansion from `(occupations, amplitude)` pairs over `modes`.
    pub fn from_terms(
        modes: Vec<ModeId>,
        terms: impl IntoIterator<Item = (Vec<u8>, Complex64)>,
        n_max: usize,
    ) -> Result<Self> {
        let mut sorted = modes.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != modes.len() {
            return Err(Error::domain("duplicate mode in Fock expansion"));
        }
        let perm: Vec<usize> = sorted.iter().map(|m| modes.iter().position(|x| x == m).unwrap_or(0)).collect();
        let mut out = BTreeMap::new();
        for (occ, amp) in terms {
            if occ.len() != modes.len() {
                return Err(Error::domain("occupation vector does not match mode list"));
            }
            let total: usize = occ.iter().map(|&n| n as usize).sum();
            if total > n_max || amp.norm() < PRUNE {
                continue;
            }
            let key: Vec<u8> = perm.iter().map(|&i| occ[i]).collect();
            *out.entry(key).or_insert(Complex64::new(0.0, 0.0)) += amp;
        }
        Ok(Self { modes: sorted, terms: out, n_max }.pruned())
    }

    pub fn modes(&self) -> &[ModeId] {
        &self.modes
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u8], Complex64)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), *v))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    /// Amplitude of the Fock state given by `(mode, count)` pairs; unlisted modes are empty.
    pub fn amplitude(&self, occupation: &[(ModeId, u8)]) -> Complex64 {
        let mut key = vec![0u8; self.modes.len()];
        for (mode, n) in occupation {
            match self.modes.binary_search(mode) {
                Ok(i) => key[i] += n,
                Err(_) if *n == 0 => {}
                Err(_) => return Complex64::new(0.0, 0.0),
            }
        }
        self.terms.get(&key).copied().unwrap_or_default()
    }

    /// Total photon number of each term.
    pub fn photon_numbers(&self) -> impl Iterator<Item = usize> + '_ {
        self.terms.keys().map(|k| k.iter().map(|&n| n as usize).sum())
    }

    /// Keeps only the terms with exactly `n` photons.
    pub fn sector(&self, n: usize) -> Self {
        self.filter(|occ| occ.iter().map(|&x| x as usize).sum::<usize>() == n)
    }

    pub(crate) fn filter(&self, keep: impl Fn(&[u8]) -> bool) -> Self {
        let terms = self.terms.iter().filter(|(k, _)| keep(k)).map(|(k, v)| (k.clone(), *v)).collect();
        Self { modes: self.modes.clone(), terms, n_max: self.n_max }
    }

    /// Multiplies all amplitudes by `s`.
    pub fn scaled(&self, s: Complex64) -> Self {
        let terms = self.terms.iter().map(|(k, v)| (k.clone(), v * s)).collect();
        Self { modes: self.modes.clone(), terms, n_max: self.n_max }.pruned()
    }

    fn pruned(mut self) -> Self {
        self.terms.retain(|_, v| v.norm() >= PRUNE);
        self
    }

    /// Renames modes through `f`; the map must be injective on this expansion's modes.
    pub fn relabel(&self, f: impl Fn(ModeId) -> ModeId) -> Result<Self> {
        let modes: Vec<ModeId> = self.modes.iter().map(|&m| f(m)).collect();
        Self::from_terms(modes, self.terms.iter().map(|(k, v)| (k.clone(), *v)), self.n_max)
    }

    /// Product of the creation-operator polynomials of `self` and `other`
    /// acting on the vacuum. Modes with equal [`ModeId`] are identified, so
    /// disjoint mode sets give the tensor product. The result is truncated at
    /// the smaller of the two photon limits.
    pub fn product(&self, other: &Self) -> Self {
        let mut modes: Vec<ModeId> = self.modes.iter().chain(&other.modes).copied().collect();
        modes.sort();
        modes.dedup();
        let n_max = self.n_max.min(other.n_max);
        let map_a: Vec<usize> = self.modes.iter().map(|m| modes.binary_search(m).unwrap_or(0)).collect();
        let map_b: Vec<usize> = other.modes.iter().map(|m| modes.binary_search(m).unwrap_or(0)).collect();

        let mut out: HashMap<Vec<u8>, Complex64> = HashMap::new();
        for (ka, va) in &self.terms {
            let na: usize = ka.iter().map(|&n| n as usize).sum();
            let pa = va / sqrt_factorials(ka);
            for (kb, vb) in &other.terms {
                let nb: usize = kb.iter().map(|&n| n as usize).sum();
                if na + nb > n_max {
                    continue;
                }
                let mut key = vec![0u8; modes.len()];
                for (i, &n) in ka.iter().enumerate() {
                    key[map_a[i]] += n;
                }
                for (i, &n) in kb.iter().enumerate() {
                    key[map_b[i]] += n;
                }
                let amp = pa * (vb / sqrt_factorials(kb)) * sqrt_factorials(&key);
                *out.entry(key).or_default() += amp;
            }
        }
        Self { modes, terms: out.into_iter().collect(), n_max }.pruned()
    }

    /// Linear substitution of creation operators: each mode `m` for which
    /// `image(m)` returns `Some(list)` is replaced by `Σ c_t · target_t^†`;
    /// other modes are left unchanged.
    pub fn substitute(&self, image: impl Fn(&ModeId) -> Option<Vec<(ModeId, Complex64)>>) -> Self {
        let images: Vec<Vec<(ModeId, Complex64)>> = self
            .modes
            .iter()
            .map(|m| {
                image(m)
                    .map(|v| v.into_iter().filter(|(_, c)| c.norm() > 0.0).collect())
                    .unwrap_or_else(|| vec![(*m, Complex64::new(1.0, 0.0))])
            })
            .collect();
        let mut modes: Vec<ModeId> = images.iter().flatten().map(|(m, _)| *m).collect();
        modes.sort();
        modes.dedup();
        let images: Vec<Vec<(usize, Complex64)>> = images
            .into_iter()
            .map(|v| v.into_iter().map(|(m, c)| (modes.binary_search(&m).unwrap_or(0), c)).collect())
            .collect();

        // Expansions of (Σ c_t x_t)^n, memoized per (source mode, n).
        let mut powers: HashMap<(usize, u8), Vec<(Vec<(usize, u8)>, Complex64)>> = HashMap::new();
        let mut out: HashMap<Vec<u8>, Complex64> = HashMap::new();
        for (occ, amp) in &self.terms {
            let mut partial: Vec<(Vec<u8>, Complex64)> = vec![(vec![0u8; modes.len()], amp / sqrt_factorials(occ))];
            for (i, &n) in occ.iter().enumerate() {
                if n == 0 {
                    continue;
                }
                let expansion = powers.entry((i, n)).or_insert_with(|| multinomial_power(&images[i], n));
                let mut next = Vec::with_capacity(partial.len() * expansion.len());
                for (key, c) in &partial {
                    for (delta, d) in expansion.iter() {
                        let mut k = key.clone();
                        for &(t, e) in delta {
                            k[t] += e;
                        }
                        next.push((k, c * d));
                    }
                }
                partial = next;
            }
            for (key, c) in partial {
                let a = c * sqrt_factorials(&key);
                *out.entry(key).or_default() += a;
            }
        }
        Self { modes, terms: out.into_iter().collect(), n_max: self.n_max }.pruned()
    }

    /// Drops modes that are empty in every term.
    pub fn compact(&self) -> Self {
        let used: Vec<bool> = (0..self.modes.len()).map(|i| self.terms.keys().any(|k| k[i] > 0)).collect();
        let modes = self.modes.iter().zip(&used).filter(|(_, &u)| u).map(|(m, _)| *m).collect();
        let terms = self
            .terms
            .iter()
            .map(|(k, v)| (k.iter().zip(&used).filter(|(_, &u)| u).map(|(&n, _)| n).collect(), *v))
            .collect();
        Self { modes, terms, n_max: self.n_max }
    }

    /// Index of `mode` in [`Self::modes`].
    pub fn mode_index(&self, mode: &ModeId) -> Option<usize> {
        self.modes.binary_search(mode).ok()
    }
}

/// All terms of `(Σ_t c_t x_t)^n` as (sparse exponent vector, multinomial weight).
fn multinomial_power(image: &[(usize, Complex64)], n: u8) -> Vec<(Vec<(usize, u8)>, Complex64)> {
    let mut out = Vec::new();
    let mut exps = vec![0u8; image.len()];
    compositions(n, 0, &mut exps, &mut |e| {
        let mut coeff = Complex64::new(factorial(n as usize), 0.0);
        let mut delta = Vec::new();
        for (&(t, c), &k) in image.iter().zip(e) {
            if k > 0 {
                coeff *= c.powu(k as u32) / factorial(k as usize);
                delta.push((t, k));
            }
        }
        out.push((delta, coeff));
    });
    out
}

fn compositions(rem: u8, pos: usize, exps: &mut [u8], f: &mut impl FnMut(&[u8])) {
    if exps.is_empty() {
        if rem == 0 {
            f(exps);
        }
        return;
    }
    if pos == exps.len() - 1 {
        exps[pos] = rem;
        f(exps);
        exps[pos] = 0;
        return;
    }
    for k in 0..=rem {
        exps[pos] = k;
        compositions(rem - k, pos + 1, exps, f);
    }
    exps[pos] = 0;
}

impl fmt::Display for FockExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (occ, amp) in &self.terms {
            let label: Vec<String> = occ
                .iter()
                .zip(&self.modes)
                .filter(|(&n, _)| n > 0)
                .map(|(n, m)| format!("{m}:{n}"))
                .collect();
            writeln!(
                f,
                "{} {} |{}>",
                crate::fmt_sig(amp.re, 6),
                crate::fmt_sig(amp.im, 6),
                if label.is_empty() { "vac".to_string() } else { label.join(",") }
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(s: Spatial) -> ModeId {
        ModeId::new(s, Polarization::H)
    }

    fn v(s: Spatial) -> ModeId {
        ModeId::new(s, Polarization::V)
    }

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn product_applies_bosonic_factors() {
        // s_H^† (s_H^† s_V^† |vac>) = sqrt(2) |2,1>
        let pair = FockExpansion::from_terms(vec![h(Spatial::S), v(Spatial::S)], [(vec![1, 1], one())], 6).unwrap();
        let single = FockExpansion::from_terms(vec![h(Spatial::S)], [(vec![1], one())], 6).unwrap();
        let p = pair.product(&single);
        let a = p.amplitude(&[(h(Spatial::S), 2), (v(Spatial::S), 1)]);
        assert!((a - 2f64.sqrt()).norm() < 1e-15);
    }

    #[test]
    fn product_truncates() {
        let x = FockExpansion::from_terms(vec![h(Spatial::S)], [(vec![2], one())], 3).unwrap();
        assert!(x.product(&x).is_empty());
    }

    #[test]
    fn substitution_beam_splitter() {
        // two photons on a balanced splitter: HOM-like amplitudes 1/2, 1/sqrt2, 1/2
        let s = FockExpansion::from_terms(vec![h(Spatial::S)], [(vec![2], one())], 4).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let out = s.substitute(|m| {
            (m.spatial == Spatial::S).then(|| {
                vec![(h(Spatial::Out(0)), Complex64::new(r, 0.0)), (h(Spatial::Out(1)), Complex64::new(r, 0.0))]
            })
        });
        let a20 = out.amplitude(&[(h(Spatial::Out(0)), 2)]);
        let a11 = out.amplitude(&[(h(Spatial::Out(0)), 1), (h(Spatial::Out(1)), 1)]);
        assert!((a20 - 0.5).norm() < 1e-15);
        assert!((a11 - r).norm() < 1e-15);
        assert!((out.norm_sqr() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn from_terms_sorts_modes_and_rejects_duplicates() {
        let x = FockExpansion::from_terms(vec![v(Spatial::S), h(Spatial::S)], [(vec![1, 0], one())], 2).unwrap();
        assert_eq!(x.modes()[0], h(Spatial::S));
        assert!((x.amplitude(&[(v(Spatial::S), 1)]) - 1.0).norm() < 1e-15);
        assert!(FockExpansion::from_terms(vec![h(Spatial::S), h(Spatial::S)], [], 2).is_err());
    }

    #[test]
    fn labels_round_trip() {
        for label in ["s", "w", "a", "e", "loss3"] {
            assert_eq!(Spatial::parse(label).unwrap().to_string(), label);
        }
        assert!(Spatial::parse("loss0").is_err());
        assert!(Spatial::parse("ab").is_err());
    }
}
