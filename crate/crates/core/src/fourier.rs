//! Fourier representation of kernels induced by time-evolution encodings,
//!
//! `κ(x, x') = Σ_{s,t ∈ Ω} e^{-i s·x} e^{i t·x'} c_st`,
//!
//! with `Ω` the set of eigenvalue-difference vectors of the generator.
//!
//! Writing `a(x) = e^{-i x_N Λ} W'_N ⋯ e^{-i x_1 Λ} W'_1 |0⟩` in the eigenbasis of
//! `G` and splitting it over eigenvalue vectors, `a(x) = Σ_Λ e^{-iΛ·x} u(Λ)`, gives
//! `⟨φ(x')|φ(x)⟩ = Σ_{Λ,Λ'} e^{-iΛ·x} e^{iΛ'·x'} B(Λ, Λ')` with `B(Λ, Λ') = ⟨u(Λ')|u(Λ)⟩`,
//! hence `c_st = Σ B(Λ1, Λ1') conj(B(Λ2, Λ2'))` over `Λ1 − Λ2 = s`, `Λ1' − Λ2' = t`.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::encoding::{DataPoint, GeneralEvolution};
use crate::error::{Error, Result};
use crate::linalg::{CVector, C64};

/// Default bound on `d^{2N}`, the number of multi-index pairs.
pub const DEFAULT_ENUMERATION_CAP: usize = 1_000_000;
/// Frequencies are compared after rounding to this many decimals.
pub const FREQUENCY_DECIMALS: i32 = 9;
pub const CONJUGATE_SYMMETRY_TOL: f64 = 1e-10;
pub const IMAGINARY_RESIDUE_TOL: f64 = 1e-9;
const EIGENVALUE_GROUP_TOL: f64 = 1e-9;

type Key = Vec<i64>;

fn key_of(v: &[f64]) -> Key {
    let scale = 10f64.powi(FREQUENCY_DECIMALS);
    v.iter().map(|x| (x * scale).round() as i64).collect()
}

fn negated(k: &[i64]) -> Key {
    k.iter().map(|v| -v).collect()
}

fn check_cap(g: &GeneralEvolution, cap: usize) -> Result<()> {
    let required = (g.dim() as f64).powi(2 * g.input_dim() as i32);
    if required > cap as f64 {
        return Err(Error::EnumerationTooLarge { required, cap });
    }
    Ok(())
}

/// Eigenvalue groups: (representative value, member indices), ascending.
fn eigen_groups(values: &[f64]) -> Vec<(f64, Vec<usize>)> {
    let mut groups: Vec<(f64, Vec<usize>)> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        match groups.last_mut() {
            Some((rep, members)) if (v - *rep).abs() <= EIGENVALUE_GROUP_TOL => members.push(i),
            _ => groups.push((v, vec![i])),
        }
    }
    groups
}

/// Distinct one-dimensional differences `λ_j − λ_k`, ascending, and for each
/// ordered group pair the index of its difference.
fn coordinate_differences(groups: &[(f64, Vec<usize>)]) -> (Vec<f64>, Vec<Vec<usize>>) {
    let mut distinct: BTreeMap<i64, f64> = BTreeMap::new();
    for (a, _) in groups {
        for (b, _) in groups {
            let d = a - b;
            let k = key_of(&[d])[0];
            let snapped = k as f64 / 10f64.powi(FREQUENCY_DECIMALS);
            // exact differences such as 1 − 1e-16 are reported as the clean value
            let v = if (snapped - d).abs() <= 1e-12 { snapped } else { d };
            distinct.entry(k).or_insert(v);
        }
    }
    let keys: Vec<i64> = distinct.keys().copied().collect();
    let values: Vec<f64> = distinct.values().copied().collect();
    let index = groups
        .iter()
        .map(|(a, _)| {
            groups
                .iter()
                .map(|(b, _)| keys.binary_search(&key_of(&[a - b])[0]).expect("difference present"))
                .collect()
        })
        .collect();
    (values, index)
}

/// All vectors `(λ_{j_1} − λ_{k_1}, …, λ_{j_N} − λ_{k_N})`, deduplicated and sorted lexicographically.
pub fn frequency_set(spec: &GeneralEvolution) -> Result<Vec<Vec<f64>>> {
    frequency_set_with_cap(spec, DEFAULT_ENUMERATION_CAP)
}

pub fn frequency_set_with_cap(spec: &GeneralEvolution, cap: usize) -> Result<Vec<Vec<f64>>> {
    check_cap(spec, cap)?;
    let groups = eigen_groups(&spec.eigen().values);
    let (diffs, _) = coordinate_differences(&groups);
    Ok(cartesian_power(&diffs, spec.input_dim()))
}

/// `values^n` in lexicographic order (first coordinate slowest).
fn cartesian_power(values: &[f64], n: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                values.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Coefficient {
    pub s: Vec<f64>,
    pub t: Vec<f64>,
    pub c: C64,
}

/// Frequency set `Ω` and the (stored, possibly sparse) coefficients `c_st`;
/// pairs that are not stored have `c_st = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencySpectrum {
    input_dim: usize,
    frequencies: Vec<Vec<f64>>,
    coefficients: Vec<Coefficient>,
    index: HashMap<(Key, Key), usize>,
}

impl FrequencySpectrum {
    /// Validates dimensions, negation closure of `Ω`, membership of every `s`, `t`
    /// in `Ω` and conjugate symmetry `c_st = conj(c_{-s,-t})` within 1e-10.
    pub fn new(input_dim: usize, frequencies: Vec<Vec<f64>>, coefficients: Vec<Coefficient>) -> Result<Self> {
        let bad = |msg: String| Error::InvalidArgument(format!("invalid frequency spectrum: {msg}"));
        if input_dim == 0 {
            return Err(bad("input_dim must be positive".into()));
        }
        let mut freq_map: BTreeMap<Key, Vec<f64>> = BTreeMap::new();
        for f in frequencies {
            if f.len() != input_dim {
                return Err(Error::DimensionMismatch {
                    expected: input_dim,
                    actual: f.len(),
                });
            }
            freq_map.entry(key_of(&f)).or_insert(f);
        }
        for k in freq_map.keys() {
            if !freq_map.contains_key(&negated(k)) {
                return Err(bad(format!("Ω is not closed under negation ({k:?})")));
            }
        }
        let mut coeff_map: BTreeMap<(Key, Key), Coefficient> = BTreeMap::new();
        for c in coefficients {
            let (ks, kt) = (key_of(&c.s), key_of(&c.t));
            if !freq_map.contains_key(&ks) || !freq_map.contains_key(&kt) {
                return Err(bad(format!("coefficient frequencies {:?}, {:?} not in Ω", c.s, c.t)));
            }
            if coeff_map.insert((ks, kt), c).is_some() {
                return Err(bad("duplicate coefficient".into()));
            }
        }
        let spectrum = Self::from_sorted(input_dim, freq_map.into_values().collect(), coeff_map);
        let residual = spectrum.conjugate_symmetry_residual();
        if residual > CONJUGATE_SYMMETRY_TOL {
            return Err(bad(format!("conjugate symmetry violated by {residual:.3e}")));
        }
        Ok(spectrum)
    }

    fn from_sorted(
        input_dim: usize,
        frequencies: Vec<Vec<f64>>,
        coeff_map: BTreeMap<(Key, Key), Coefficient>,
    ) -> Self {
        let mut index = HashMap::with_capacity(coeff_map.len());
        let mut coefficients = Vec::with_capacity(coeff_map.len());
        for (i, (k, c)) in coeff_map.into_iter().enumerate() {
            index.insert(k, i);
            coefficients.push(c);
        }
        Self {
            input_dim,
            frequencies,
            coefficients,
            index,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn frequencies(&self) -> &[Vec<f64>] {
        &self.frequencies
    }

    /// Stored coefficients, sorted lexicographically by `(s, t)`.
    pub fn coefficients(&self) -> &[Coefficient] {
        &self.coefficients
    }

    /// `c_st`, zero when not stored.
    pub fn coefficient(&self, s: &[f64], t: &[f64]) -> C64 {
        self.index
            .get(&(key_of(s), key_of(t)))
            .map_or(C64::new(0.0, 0.0), |&i| self.coefficients[i].c)
    }

    /// `max |c_st − conj(c_{-s,-t})|`.
    pub fn conjugate_symmetry_residual(&self) -> f64 {
        self.coefficients
            .iter()
            .map(|c| {
                let ns: Vec<f64> = c.s.iter().map(|v| -v).collect();
                let nt: Vec<f64> = c.t.iter().map(|v| -v).collect();
                (c.c - self.coefficient(&ns, &nt).conj()).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Sum of all coefficients, i.e. `κ(0, 0)`.
    pub fn total(&self) -> C64 {
        self.coefficients.iter().map(|c| c.c).sum()
    }
}

#[derive(Serialize, Deserialize)]
struct RawCoefficient {
    s: Vec<f64>,
    t: Vec<f64>,
    c: [f64; 2],
}

#[derive(Serialize, Deserialize)]
struct RawSpectrum {
    input_dim: usize,
    frequencies: Vec<Vec<f64>>,
    coefficients: Vec<RawCoefficient>,
}

impl Serialize for FrequencySpectrum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawSpectrum {
            input_dim: self.input_dim,
            frequencies: self.frequencies.clone(),
            coefficients: self
                .coefficients
                .iter()
                .map(|c| RawCoefficient {
                    s: c.s.clone(),
                    t: c.t.clone(),
                    c: [c.c.re, c.c.im],
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FrequencySpectrum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawSpectrum::deserialize(d)?;
        let coefficients = raw
            .coefficients
            .into_iter()
            .map(|c| Coefficient {
                s: c.s,
                t: c.t,
                c: C64::new(c.c[0], c.c[1]),
            })
            .collect();
        FrequencySpectrum::new(raw.input_dim, raw.frequencies, coefficients)
            .map_err(serde::de::Error::custom)
    }
}

/// `u(Λ)` for every eigenvalue-group path with a nonzero component.
fn path_vectors(spec: &GeneralEvolution, groups: &[(f64, Vec<usize>)]) -> Vec<(Vec<usize>, CVector)> {
    let ws = spec.absorbed_interleavers();
    let n = spec.input_dim();
    let mut paths: Vec<(Vec<usize>, CVector)> =
        vec![(Vec::new(), ws[0].entries().column(0).into_owned())];
    for i in 0..n {
        let mut next = Vec::with_capacity(paths.len() * groups.len());
        for (path, v) in &paths {
            for (g, (_, members)) in groups.iter().enumerate() {
                let mut w = CVector::zeros(v.len());
                for &m in members {
                    w[m] = v[m];
                }
                if w.iter().all(|z| z.norm_sqr() == 0.0) {
                    continue;
                }
                if i + 1 < n {
                    w = ws[i + 1].entries() * w;
                }
                let mut p = path.clone();
                p.push(g);
                next.push((p, w));
            }
        }
        paths = next;
    }
    paths
}

/// Fourier coefficients `c_st` of the kernel induced by `spec`.
pub fn coefficients(spec: &GeneralEvolution) -> Result<FrequencySpectrum> {
    coefficients_with_cap(spec, DEFAULT_ENUMERATION_CAP)
}

pub fn coefficients_with_cap(spec: &GeneralEvolution, cap: usize) -> Result<FrequencySpectrum> {
    check_cap(spec, cap)?;
    let n = spec.input_dim();
    let groups = eigen_groups(&spec.eigen().values);
    let (diffs, diff_index) = coordinate_differences(&groups);
    let m = diffs.len();
    let n_freq = m.pow(n as u32);

    let paths = path_vectors(spec, &groups);
    let l = paths.len();
    // s index of Λ_p − Λ_q in mixed radix, first coordinate most significant
    let mut sidx = vec![0usize; l * l];
    for p in 0..l {
        for q in 0..l {
            sidx[p * l + q] = paths[p]
                .0
                .iter()
                .zip(&paths[q].0)
                .fold(0, |acc, (&a, &b)| acc * m + diff_index[a][b]);
        }
    }
    let mut b = vec![C64::new(0.0, 0.0); l * l];
    for p in 0..l {
        for q in 0..l {
            b[p * l + q] = paths[q].1.dotc(&paths[p].1);
        }
    }

    let mut acc: HashMap<usize, C64> = HashMap::new();
    for p1 in 0..l {
        for q1 in 0..l {
            let b1 = b[p1 * l + q1];
            if b1.norm_sqr() == 0.0 {
                continue;
            }
            for p2 in 0..l {
                let s = sidx[p1 * l + p2];
                for q2 in 0..l {
                    let b2 = b[p2 * l + q2];
                    if b2.norm_sqr() == 0.0 {
                        continue;
                    }
                    let t = sidx[q1 * l + q2];
                    *acc.entry(s * n_freq + t).or_insert(C64::new(0.0, 0.0)) += b1 * b2.conj();
                }
            }
        }
    }

    let decode = |mut idx: usize| -> Vec<f64> {
        let mut v = vec![0.0; n];
        for k in (0..n).rev() {
            v[k] = diffs[idx % m];
            idx /= m;
        }
        v
    };
    let mut entries: Vec<(usize, C64)> = acc.into_iter().collect();
    entries.sort_by_key(|(k, _)| *k);
    let coeff_map: BTreeMap<(Key, Key), Coefficient> = entries
        .into_iter()
        .map(|(k, c)| {
            let (s, t) = (decode(k / n_freq), decode(k % n_freq));
            ((key_of(&s), key_of(&t)), Coefficient { s, t, c })
        })
        .collect();
    Ok(FrequencySpectrum::from_sorted(n, cartesian_power(&diffs, n), coeff_map))
}

/// `Σ_{s,t} e^{-i s·x} e^{i t·x2} c_st` before the realness check.
pub fn evaluate_series_complex(spectrum: &FrequencySpectrum, x: &DataPoint, x2: &DataPoint) -> Result<C64> {
    let n = spectrum.input_dim();
    for p in [x, x2] {
        if p.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: p.len(),
            });
        }
    }
    let (xs, ys) = (x.real_values()?, x2.real_values()?);
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| u * v).sum::<f64>();
    Ok(spectrum
        .coefficients()
        .iter()
        .map(|c| C64::from_polar(1.0, dot(&c.t, &ys) - dot(&c.s, &xs)) * c.c)
        .sum())
}

/// The kernel value reconstructed from its Fourier series.
pub fn evaluate_series(spectrum: &FrequencySpectrum, x: &DataPoint, x2: &DataPoint) -> Result<f64> {
    let z = evaluate_series_complex(spectrum, x, x2)?;
    if z.im.abs() > IMAGINARY_RESIDUE_TOL {
        return Err(Error::ImaginaryResidue { residue: z.im.abs() });
    }
    Ok(z.re)
}

/// True iff every off-diagonal (`s ≠ t`) coefficient has magnitude at most `tol`,
/// i.e. the kernel depends on `x − x'` only.
pub fn is_translation_invariant(spectrum: &FrequencySpectrum, tol: f64) -> bool {
    spectrum
        .coefficients()
        .iter()
        .filter(|c| key_of(&c.s) != key_of(&c.t))
        .all(|c| c.c.norm() <= tol)
}

/// True iff every frequency component lies within 1e-9 of an integer.
pub fn integer_spectrum_check(spectrum: &FrequencySpectrum) -> bool {
    spectrum
        .frequencies()
        .iter()
        .flatten()
        .all(|v| (v - v.round()).abs() <= 1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::EncodingSpec;
    use crate::kernel::kernel;
    use crate::linalg::{HermitianOperator, Unitary};
    use crate::test_support::{random_hermitian, random_unitary};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn rx_spec() -> GeneralEvolution {
        GeneralEvolution::with_identity_interleavers(1, HermitianOperator::pauli_x().scaled(0.5), 1).unwrap()
    }

    fn random_spec(seed: u64, n_qubits: usize, input_dim: usize) -> GeneralEvolution {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = 1 << n_qubits;
        let ws = (0..=input_dim).map(|_| random_unitary(&mut rng, d)).collect();
        GeneralEvolution::new(n_qubits, random_hermitian(&mut rng, d), ws).unwrap()
    }

    fn p(v: &[f64]) -> DataPoint {
        DataPoint::new(v.to_vec())
    }

    #[test]
    fn frequency_set_examples() {
        assert_eq!(frequency_set(&rx_spec()).unwrap(), vec![vec![-1.0], vec![0.0], vec![1.0]]);
        let zero = GeneralEvolution::with_identity_interleavers(1, HermitianOperator::zeros(2), 1).unwrap();
        assert_eq!(frequency_set(&zero).unwrap(), vec![vec![0.0]]);
        let z2 = GeneralEvolution::with_identity_interleavers(1, HermitianOperator::pauli_z().scaled(0.5), 2).unwrap();
        let omega = frequency_set(&z2).unwrap();
        assert_eq!(omega.len(), 9);
        assert_eq!(omega[0], vec![-1.0, -1.0]);
        assert_eq!(omega[8], vec![1.0, 1.0]);
    }

    #[test]
    fn enumeration_cap() {
        let spec = random_spec(1, 2, 2);
        assert!(matches!(frequency_set_with_cap(&spec, 100), Err(Error::EnumerationTooLarge { .. })));
        assert!(coefficients_with_cap(&spec, 256).is_ok());
        assert!(matches!(coefficients_with_cap(&spec, 255), Err(Error::EnumerationTooLarge { .. })));
    }

    #[test]
    fn rx_spectrum() {
        let spec = coefficients(&rx_spec()).unwrap();
        assert_eq!(spec.frequencies().len(), 3);
        assert_abs_diff_eq!(spec.coefficient(&[0.0], &[0.0]).re, 0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(spec.coefficient(&[1.0], &[1.0]).re, 0.25, epsilon = 1e-10);
        assert_abs_diff_eq!(spec.coefficient(&[-1.0], &[-1.0]).re, 0.25, epsilon = 1e-10);
        for c in spec.coefficients() {
            if c.s != c.t {
                assert!(c.c.norm() <= 1e-10);
            }
        }
        assert!(is_translation_invariant(&spec, 1e-10));
        assert!(integer_spectrum_check(&spec));
        assert_abs_diff_eq!(evaluate_series(&spec, &p(&[0.0]), &p(&[PI])).unwrap(), 0.0, epsilon = 1e-12);
        for &(x, y) in &[(0.3, -1.2), (2.0, 2.0), (-3.0, 1.0)] {
            // cos²(u/2) = (1 + cos u)/2
            let oracle = (1.0 + f64::cos(x - y)) / 2.0;
            assert_abs_diff_eq!(evaluate_series(&spec, &p(&[x]), &p(&[y])).unwrap(), oracle, epsilon = 1e-12);
        }
    }

    #[test]
    fn diagonal_generator_identity_interleavers() {
        let g = HermitianOperator::from_diagonal(&[-0.5, 0.25, 1.0, 2.0]).unwrap();
        let spec = GeneralEvolution::with_identity_interleavers(2, g, 2).unwrap();
        let s = coefficients(&spec).unwrap();
        assert_eq!(s.coefficients().len(), 1);
        assert_abs_diff_eq!(s.coefficient(&[0.0, 0.0], &[0.0, 0.0]).re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn series_matches_simulation_for_random_specs() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for (seed, nq, n) in [(3u64, 1usize, 1usize), (4, 1, 2), (5, 2, 2), (6, 1, 3)] {
            let g = random_spec(seed, nq, n);
            let spectrum = coefficients(&g).unwrap();
            assert!(spectrum.conjugate_symmetry_residual() <= 1e-10);
            assert_abs_diff_eq!(spectrum.total().re, 1.0, epsilon = 1e-9);
            let enc = EncodingSpec::GeneralEvolution(g);
            for _ in 0..30 {
                let x: Vec<f64> = (0..n).map(|_| rng.random_range(-PI..PI)).collect();
                let y: Vec<f64> = (0..n).map(|_| rng.random_range(-PI..PI)).collect();
                let series = evaluate_series(&spectrum, &p(&x), &p(&y)).unwrap();
                let sim = kernel(&enc, &p(&x), &p(&y)).unwrap();
                assert!((series - sim).abs() <= 1e-8, "{series} vs {sim}");
            }
        }
    }

    #[test]
    fn absorbing_v_is_exact() {
        let g = random_spec(9, 2, 2);
        let a = coefficients(&g).unwrap();
        let b = coefficients(&g.diagonalized().unwrap()).unwrap();
        assert_eq!(a.coefficients().len(), b.coefficients().len());
        for c in a.coefficients() {
            assert!((c.c - b.coefficient(&c.s, &c.t)).norm() <= 1e-10);
        }
    }

    #[test]
    fn entangled_two_feature_spec_is_not_translation_invariant() {
        let z = HermitianOperator::pauli_z().scaled(0.5);
        let h = Unitary::ry(PI / 2.0);
        let spec = GeneralEvolution::new(1, z, vec![h.clone(), h.clone(), Unitary::identity(2)]).unwrap();
        let s = coefficients(&spec).unwrap();
        assert!(!is_translation_invariant(&s, 1e-10));
        let shifted = kernel(&EncodingSpec::GeneralEvolution(spec.clone()), &p(&[0.4, 0.9]), &p(&[0.1, 0.2])).unwrap();
        let base = kernel(&EncodingSpec::GeneralEvolution(spec), &p(&[1.4, 1.9]), &p(&[1.1, 1.2])).unwrap();
        assert!((shifted - base).abs() > 1e-6);
    }

    #[test]
    fn irrational_gap() {
        let g = HermitianOperator::from_diagonal(&[0.0, 2f64.sqrt()]).unwrap();
        let spec = GeneralEvolution::with_identity_interleavers(1, g, 1).unwrap();
        assert!(!integer_spectrum_check(&coefficients(&spec).unwrap()));
        let z = GeneralEvolution::with_identity_interleavers(1, HermitianOperator::pauli_z().scaled(0.5), 1).unwrap();
        assert!(integer_spectrum_check(&coefficients(&z).unwrap()));
    }

    #[test]
    fn hand_built_spectra() {
        let off = FrequencySpectrum::new(
            1,
            vec![vec![-1.0], vec![0.0], vec![1.0]],
            vec![
                Coefficient { s: vec![1.0], t: vec![0.0], c: C64::new(0.3, 0.0) },
                Coefficient { s: vec![-1.0], t: vec![0.0], c: C64::new(0.3, 0.0) },
            ],
        )
        .unwrap();
        assert!(!is_translation_invariant(&off, 1e-10));
        let asym = FrequencySpectrum::new(
            1,
            vec![vec![-1.0], vec![0.0], vec![1.0]],
            vec![Coefficient { s: vec![1.0], t: vec![0.0], c: C64::new(0.3, 0.0) }],
        );
        assert!(asym.is_err());
        assert!(FrequencySpectrum::new(1, vec![vec![0.0], vec![1.0]], vec![]).is_err());
        let z = C64::new(0.0, 0.0);
        assert_eq!(off.coefficient(&[0.0], &[0.0]), z);
    }

    #[test]
    fn json_is_sorted_and_round_trips() {
        let s = coefficients(&random_spec(11, 1, 2)).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        let back: FrequencySpectrum = serde_json::from_str(&json).unwrap();
        assert_eq!(s.coefficients(), back.coefficients());
        let keys: Vec<(Key, Key)> = s.coefficients().iter().map(|c| (key_of(&c.s), key_of(&c.t))).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn dimension_mismatch_in_series() {
        let s = coefficients(&rx_spec()).unwrap();
        assert!(evaluate_series(&s, &p(&[0.0, 1.0]), &p(&[0.0])).is_err());
    }
}
