use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;

use super::io::{read_symmetric_binary, write_matrix_binary, write_matrix_csv, MatrixHeader};
use super::*;
use crate::error::Error;
use crate::linalg::{asymmetry, max_abs, Mat};
use crate::single_particle::{solve_trap, SingleParticleBasis, TrapPotential};
use crate::symmetry::{
    all_permutations, partitions, permutation_matrix, sector_projector, Partition,
};

fn harmonic_sp(cutoff: usize) -> Arc<SingleParticleBasis> {
    Arc::new(solve_trap(&TrapPotential::harmonic(1.0), cutoff).unwrap())
}

fn fock(n: usize, cutoff: usize, e_max: f64) -> Arc<FockBasis> {
    Arc::new(FockBasis::new(harmonic_sp(cutoff), n, e_max).unwrap())
}

#[test]
fn two_particle_basis_enumeration() {
    let b = fock(2, 6, 3.0);
    let expected: Vec<Vec<usize>> = vec![
        vec![0, 0],
        vec![0, 1],
        vec![1, 0],
        vec![0, 2],
        vec![1, 1],
        vec![2, 0],
    ];
    assert_eq!(b.states(), expected.as_slice());
    assert_eq!(b.energies(), &[1.0, 2.0, 2.0, 3.0, 3.0, 3.0]);
}

#[test]
fn single_particle_basis_is_the_one_body_limit() {
    let sp = harmonic_sp(10);
    let b = FockBasis::new(sp.clone(), 1, 4.5).unwrap();
    assert_eq!(b.len(), 5);
    for (i, s) in b.states().iter().enumerate() {
        assert_eq!(s, &vec![i]);
        assert_eq!(b.energies()[i], sp.energy(i));
    }
}

#[test]
fn three_particle_basis_matches_brute_force() {
    let b = fock(3, 8, 4.5);
    let mut count = 0;
    for n1 in 0..8 {
        for n2 in 0..8 {
            for n3 in 0..8 {
                if n1 + n2 + n3 <= 3 {
                    count += 1;
                    assert!(b.index_of(&[n1, n2, n3]).is_some());
                }
            }
        }
    }
    assert_eq!(count, 20);
    assert_eq!(b.len(), 20);
}

#[test]
fn basis_invariants() {
    let b = fock(3, 9, 8.5);
    let states = b.states();
    for w in 0..states.len() - 1 {
        let key = |i: usize| (b.energies()[i], states[i].clone());
        assert!(key(w).partial_cmp(&key(w + 1)) == Some(std::cmp::Ordering::Less));
    }
    for s in states {
        assert!(b.energies()[b.index_of(s).unwrap()] <= 8.5 + 1e-12);
        for g in all_permutations(3) {
            assert!(b.index_of(&g.act(s)).is_some());
        }
    }
    let covered: usize = b.orbits().iter().map(|o| o.members.len()).sum();
    assert_eq!(covered, b.len());
    for (o, orbit) in b.orbits().iter().enumerate() {
        for &m in &orbit.members {
            assert_eq!(b.orbit_of(m), o);
        }
    }
}

#[test]
fn basis_below_ground_energy_is_empty() {
    let err = FockBasis::new(harmonic_sp(4), 2, 0.9).unwrap_err();
    assert!(matches!(err, Error::EmptyBasis { .. }));
    assert!(FockBasis::new(harmonic_sp(4), 0, 3.0).is_err());
}

#[test]
fn interaction_element_examples() {
    let well = solve_trap(&TrapPotential::infinite_well(1.0), 4).unwrap();
    assert!((interaction_element(&well, [0, 0, 0, 0]).unwrap() - 1.5).abs() < 1e-12);
    let sp = harmonic_sp(6);
    let gauss = 1.0 / (2.0 * PI).sqrt();
    assert!((interaction_element(&sp, [0, 0, 0, 0]).unwrap() - gauss).abs() < 1e-12);
    assert!(interaction_element(&sp, [0, 1, 0, 0]).unwrap().abs() < 1e-14);
    assert!(matches!(
        interaction_element(&sp, [0, 6, 0, 0]),
        Err(Error::InvalidArgument(_))
    ));
}

#[test]
fn integral_cache_uses_sorted_quadruples() {
    let sp = harmonic_sp(5);
    let mut cache = ContactIntegrals::new(&sp);
    let a = cache.get([3, 1, 2, 0]);
    let b = cache.get([0, 1, 2, 3]);
    assert_eq!(a, b);
    assert_eq!(cache.cached(), 1);
}

#[test]
fn non_interacting_hamiltonian_is_diagonal() {
    let b = fock(3, 8, 6.5);
    let h = build_hamiltonian(&b, 0.0).unwrap();
    let m = h.matrix();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if i == j {
                assert_eq!(m[(i, i)], b.energies()[i]);
            } else {
                assert_eq!(m[(i, j)], 0.0);
            }
        }
    }
}

#[test]
fn hamiltonian_is_symmetric_and_linear_in_g() {
    let b = fock(3, 8, 6.5);
    let h1 = build_hamiltonian(&b, 1.7).unwrap();
    assert!(asymmetry(&h1.matrix()) <= 1e-12);
    let h2 = h1.with_coupling(-0.4);
    assert!(Arc::ptr_eq(&h1.basis().clone(), &h2.basis().clone()));
    let diff = h1.matrix() - h2.matrix();
    assert!(max_abs(&(diff - h1.vint() * 2.1)) < 1e-13);
    assert!(build_hamiltonian(&b, f64::NAN).is_err());
}

#[test]
fn ground_energy_is_monotone_in_g() {
    let b = fock(2, 12, 12.0);
    let ground = |g: f64| {
        let m = build_hamiltonian(&b, g).unwrap().matrix();
        m.symmetric_eigenvalues().min()
    };
    let (e0, e_half, e1) = (ground(0.0), ground(0.5), ground(1.0));
    assert!(e0 < e_half && e_half < e1, "{e0} {e_half} {e1}");
}

#[test]
fn contact_operator_commutes_with_permutations() {
    for n in 2..=4 {
        let b = fock(n, 6, n as f64 * 0.5 + 3.0);
        let h = build_hamiltonian(&b, 2.3).unwrap().matrix();
        for g in all_permutations(n) {
            let u = permutation_matrix(&g, &b).unwrap();
            assert!(max_abs(&(&h * &u - &u * &h)) < 1e-10);
        }
    }
}

/// Dense `δ(x_1 - x_2)` on two full single-particle factors of size `c`.
fn two_body_tensor(sp: &SingleParticleBasis, c: usize) -> Mat {
    Mat::from_fn(c * c, c * c, |r, s| {
        interaction_element(sp, [r / c, r % c, s / c, s % c]).unwrap()
    })
}

#[test]
fn pair_terms_match_kronecker_construction() {
    let c = 4;
    let b = fock(3, c, f64::INFINITY);
    assert_eq!(b.len(), c * c * c);
    let t = two_body_tensor(b.single_particle(), c);
    let id = Mat::identity(c, c);
    // Row-major product ordering (n1, n2, n3) -> index.
    let to_product = |s: &[usize]| (s[0] * c + s[1]) * c + s[2];
    let reorder = |m: &Mat| {
        Mat::from_fn(b.len(), b.len(), |i, j| {
            m[(to_product(&b.states()[i]), to_product(&b.states()[j]))]
        })
    };
    let v01 = reorder(&t.kronecker(&id));
    let v12 = reorder(&id.kronecker(&t));
    assert!(max_abs(&(pair_term(&b, 0, 1).unwrap() - &v01)) < 1e-14);
    assert!(max_abs(&(pair_term(&b, 1, 2).unwrap() - &v12)) < 1e-14);
    // (0,2) via the transposition of particles 1 and 2.
    let swap = permutation_matrix(
        &crate::symmetry::Permutation::new(vec![0, 2, 1]).unwrap(),
        &b,
    )
    .unwrap();
    let v02 = &swap * &v01 * swap.transpose();
    assert!(max_abs(&(pair_term(&b, 0, 2).unwrap() - &v02)) < 1e-14);
    let total = &v01 + &v12 + &v02;
    let h = build_hamiltonian(&b, 1.0).unwrap();
    assert!(max_abs(&(h.vint() - total)) < 1e-13);
    assert!(pair_term(&b, 1, 1).is_err());
}

#[test]
fn enlarging_the_truncation_keeps_matrix_elements() {
    let sp = harmonic_sp(10);
    let small = Arc::new(FockBasis::new(sp.clone(), 3, 5.5).unwrap());
    let large = Arc::new(FockBasis::new(sp, 3, 8.5).unwrap());
    let hs = build_hamiltonian(&small, 0.8).unwrap().matrix();
    let hl = build_hamiltonian(&large, 0.8).unwrap().matrix();
    for (i, si) in small.states().iter().enumerate() {
        let li = large.index_of(si).unwrap();
        for (j, sj) in small.states().iter().enumerate() {
            let lj = large.index_of(sj).unwrap();
            assert_eq!(hs[(i, j)], hl[(li, lj)]);
        }
    }
}

#[test]
fn two_particle_sector_blocks() {
    let b = fock(2, 6, 3.0);
    let h = build_hamiltonian(&b, 1.3).unwrap();
    let bos = sector_projector(&Partition::symmetric(2), &b).unwrap();
    let fer = sector_projector(&Partition::antisymmetric(2), &b).unwrap();
    let bb = sector_block(&h, &bos).unwrap();
    let fb = sector_block(&h, &fer).unwrap();
    assert_eq!((bb.nrows(), fb.nrows()), (4, 2));
    for g in [0.0, 1.0, 10.0, 1000.0] {
        let fg = sector_block(&h.with_coupling(g), &fer).unwrap();
        let f0 = sector_block(&h.with_coupling(0.0), &fer).unwrap();
        assert!(max_abs(&(fg - f0)) < 1e-10);
    }
}

#[test]
fn distinct_orbit_block_sizes() {
    // Sector columns contributed by the all-distinct orbit of (0,1,2).
    let b = fock(3, 6, 4.5);
    let orbit = b.orbits().iter().position(|o| o.key == vec![0, 1, 2]).unwrap();
    let sizes: Vec<usize> = partitions(3)
        .unwrap()
        .iter()
        .map(|l| {
            let p = sector_projector(l, &b).unwrap();
            (0..p.rank()).filter(|&k| p.basis().orbit_of_column(k) == orbit).count()
        })
        .collect();
    assert_eq!(sizes, vec![1, 4, 1]);
}

#[test]
fn sectors_decouple() {
    let b = fock(3, 8, 6.5);
    let h = build_hamiltonian(&b, 3.0).unwrap();
    let m = h.matrix();
    let projs: Vec<_> = partitions(3)
        .unwrap()
        .iter()
        .map(|l| sector_projector(l, &b).unwrap())
        .collect();
    let total: usize = projs.iter().map(|p| sector_block(&h, p).unwrap().nrows()).sum();
    assert_eq!(total, b.len());
    for (a, pa) in projs.iter().enumerate() {
        for (c, pc) in projs.iter().enumerate() {
            if a != c {
                let off = pa.matrix() * &m * pc.matrix();
                assert!(max_abs(&off) <= 1e-10);
            }
        }
    }
    let other = fock(2, 8, 6.0);
    let wrong = sector_projector(&Partition::symmetric(2), &other).unwrap();
    assert!(matches!(sector_block(&h, &wrong), Err(Error::Mismatch(_))));
}

#[test]
fn sector_hamiltonian_matches_projected_matrix() {
    let b = fock(3, 8, 6.5);
    let h = build_hamiltonian(&b, 0.0).unwrap();
    let p = sector_projector(&Partition::new(vec![2, 1]).unwrap(), &b).unwrap();
    let sector = SectorHamiltonian::new(&h, p.basis()).unwrap();
    let dense = p.basis().to_dense();
    for g in [0.0, 2.5] {
        let direct = dense.transpose() * h.with_coupling(g).matrix() * &dense;
        assert!(max_abs(&(sector.at(g) - direct)) < 1e-12);
    }
}

#[test]
fn binary_round_trip() {
    let b = fock(2, 6, 5.0);
    let h = build_hamiltonian(&b, 0.75).unwrap();
    let mut buf = Vec::new();
    write_matrix_binary(&h, &mut buf).unwrap();
    let d = h.dim();
    assert_eq!(buf.len(), 24 + 8 * d * (d + 1) / 2);
    let (header, m) = read_symmetric_binary(buf.as_slice()).unwrap();
    assert_eq!(
        header,
        MatrixHeader {
            dim: d as u64,
            g: 0.75,
            e_max: 5.0
        }
    );
    assert_eq!(m, h.matrix());
    assert!(matches!(
        read_symmetric_binary(&buf[..buf.len() - 3]),
        Err(Error::Parse(_))
    ));
}

#[test]
fn csv_export_round_trips_to_full_precision() {
    let b = fock(2, 4, 3.0);
    let m = build_hamiltonian(&b, 0.3).unwrap().matrix();
    let mut buf = Vec::new();
    write_matrix_csv(&m, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    for (i, line) in text.lines().enumerate() {
        for (j, field) in line.split(',').enumerate() {
            assert_eq!(field.parse::<f64>().unwrap(), m[(i, j)]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn contact_integrals_are_fully_symmetric(
        a in 0usize..8, b in 0usize..8, c in 0usize..8, d in 0usize..8,
    ) {
        let sp = harmonic_sp(8);
        let base = interaction_element(&sp, [a, b, c, d]).unwrap();
        for perm in [[b, a, c, d], [c, d, a, b], [d, b, c, a], [a, c, b, d]] {
            prop_assert!((interaction_element(&sp, perm).unwrap() - base).abs() < 1e-14);
        }
        if (a + b + c + d) % 2 == 1 {
            prop_assert!(base.abs() < 1e-13);
        }
    }

    #[test]
    fn vint_is_positive_semidefinite(g in 0.0f64..5.0) {
        let b = fock(2, 6, 5.0);
        let h = build_hamiltonian(&b, g).unwrap();
        let min = h.vint().clone().symmetric_eigenvalues().min();
        prop_assert!(min > -1e-12);
    }
}
