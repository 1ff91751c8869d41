mod common;

use std::collections::BTreeMap;

use common::oracle::{action, Oracle};
use g2gauge::coeffring::{int, rat, Rational};
use g2gauge::dbcech::{
    action_terms, kuhn_winding, BackgroundCocycle, CechCochain, Cover, DBClass, Flag, PolyDecomp,
};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sphere_tops() -> Vec<Vec<u32>> {
    (0..5u32)
        .map(|i| {
            let mut t: Vec<u32> = (0..5).filter(|&v| v != i).collect();
            if i % 2 == 1 {
                t.reverse();
                t.swap(1, 3);
            }
            t
        })
        .collect()
}

fn tops_of(cover: &Cover) -> Vec<Vec<u32>> {
    cover
        .top_simplices()
        .map(|(s, o)| {
            let mut t = s.to_vec();
            if o < 0 {
                t.swap(0, 1);
            }
            t
        })
        .collect()
}

fn constant_theta(cover: &Cover, c: i64) -> CechCochain {
    let mut theta = CechCochain::integral(0);
    for v in cover.nerve(0) {
        theta.set_constant(v.clone(), int(c));
    }
    theta
}

fn random_global(cover: &Cover, rng: &mut ChaCha8Rng) -> BTreeMap<Flag, Rational> {
    let mut g = BTreeMap::new();
    for v in 0..cover.num_charts() as u32 {
        for f in cover.local_simplices(&[v], 1) {
            g.entry(f).or_insert_with(|| rat(rng.random_range(-4i64..=4), rng.random_range(1i64..=3)));
        }
    }
    g
}

fn random_class(cover: &Cover, ups: &CechCochain, rng: &mut ChaCha8Rng) -> DBClass {
    let g = random_global(cover, rng);
    DBClass::from_integral_cocycle(cover, ups)
        .with_global_connection(cover, &g)
        .local_gauge(cover, &CechCochain::random_forms(cover, 0, 0, rng))
        .unwrap()
}

fn compare(cover: &Cover, o: &Oracle, classes: &[DBClass], bg: &BackgroundCocycle) {
    let p = PolyDecomp::build(cover);
    let lib = action_terms(cover, &p, classes, bg).unwrap();
    let ora = action(o, classes, bg);
    assert_eq!(lib.ladder, ora.ladder);
    assert_eq!(lib.chi_term, ora.chi_term);
    assert_eq!(lib.tau_term, ora.tau_term);
    assert!(lib.ladder.iter().any(|x| !x.is_zero()), "vacuous comparison");
}

#[test]
fn dual_cells_match_geometric_orientation() {
    let cover = Cover::sphere(3);
    let o = Oracle::new(&cover, &sphere_tops());
    let p = PolyDecomp::build(&cover);
    for m in 0..=3 {
        for t in cover.nerve(m) {
            let mine: BTreeMap<Vec<u32>, i64> = o.cell(t).into_iter().map(|(f, c)| (o.ids(&f), c)).collect();
            let lib: BTreeMap<Vec<u32>, i64> = p.cell(t).unwrap().terms().map(|(f, c)| (f.clone(), c)).collect();
            assert_eq!(mine, lib, "cell of {t:?}");
        }
    }
}

#[test]
fn sphere_two_classes_constant_background() {
    let cover = Cover::sphere(3);
    let o = Oracle::new(&cover, &sphere_tops());
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..3 {
        let classes: Vec<DBClass> = (0..2)
            .map(|_| {
                let z = CechCochain::random_integral(&cover, 1, &mut rng);
                random_class(&cover, &z.delta(&cover), &mut rng)
            })
            .collect();
        let bg = BackgroundCocycle::new(&cover, constant_theta(&cover, 3)).unwrap();
        compare(&cover, &o, &classes, &bg);
    }
}

#[test]
fn sphere_one_class_exact_background() {
    let cover = Cover::sphere(3);
    let o = Oracle::new(&cover, &sphere_tops());
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..3 {
        let z = CechCochain::random_integral(&cover, 1, &mut rng);
        let theta = CechCochain::random_integral(&cover, 1, &mut rng).delta(&cover);
        let class = random_class(&cover, &z.delta(&cover), &mut rng);
        let bg = BackgroundCocycle::new(&cover, theta).unwrap();
        compare(&cover, &o, &[class], &bg);
    }
}

#[test]
fn global_connections_integrate_directly() {
    let cover = Cover::sphere(3);
    let o = Oracle::new(&cover, &sphere_tops());
    let p = PolyDecomp::build(&cover);
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let g = random_global(&cover, &mut rng);
    let h = random_global(&cover, &mut rng);
    let classes =
        [DBClass::zero().with_global_connection(&cover, &g), DBClass::zero().with_global_connection(&cover, &h)];
    let bg = BackgroundCocycle::new(&cover, constant_theta(&cover, 1)).unwrap();
    let lib = action_terms(&cover, &p, &classes, &bg).unwrap().total();
    let val = |m: &BTreeMap<Flag, Rational>, f: &[Vec<u32>]| m[&o.ids(f)].clone();
    let direct = o.integrate_global(|f| {
        let dh = val(&h, &f[2..]) - val(&h, &[f[1].clone(), f[3].clone()]) + val(&h, &f[1..3]);
        val(&g, &f[..2]) * dh
    });
    assert_eq!(lib, direct);
}

#[test]
fn torus_coordinate_classes() {
    let cover = Cover::kuhn_torus(3, 3);
    let o = Oracle::new(&cover, &tops_of(&cover));
    let u: Vec<CechCochain> = (0..3).map(|a| kuhn_winding(&cover, 3, a)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let a = random_class(&cover, &u[0].cech_cup(&u[1], &cover), &mut rng);
    let b = random_class(&cover, &u[1].cech_cup(&u[2], &cover), &mut rng);
    let bg = BackgroundCocycle::new(&cover, constant_theta(&cover, 1)).unwrap();
    compare(&cover, &o, &[a.clone(), b], &bg);
    let bg = BackgroundCocycle::new(&cover, u[0].cech_cup(&u[1], &cover)).unwrap();
    compare(&cover, &o, &[a], &bg);
}
