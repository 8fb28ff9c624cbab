use agler_cli::format::{read_certificate, read_poly, read_report, write_certificate, write_poly, write_report};
use agler_core::agler::{AglerCertificate, Check, Metadata, Report};
use agler_core::poly::{AnalyticPoly, VectorPoly};
use agler_core::sos::{Attempt, Route};
use agler_core::{MultiIndex, C64};
use proptest::prelude::*;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1e3..1e3f64,
        any::<f64>().prop_filter("finite", |x| x.is_finite()),
        Just(0.1),
        Just(1e-300),
    ]
}

fn poly(nvars: usize) -> impl Strategy<Value = AnalyticPoly> {
    proptest::collection::vec(0..4i32, nvars).prop_flat_map(move |deg| {
        let d = MultiIndex::new(&deg);
        let size = d.box_size();
        proptest::collection::vec((finite(), finite(), any::<bool>()), size).prop_map(move |cs| {
            let terms = d
                .box_iter()
                .zip(cs)
                .filter(|(_, (_, _, keep))| *keep)
                .map(|(i, (re, im, _))| (i, C64::new(re, im)));
            AnalyticPoly::from_terms(d, terms).unwrap()
        })
    })
}

fn vector(degree: MultiIndex) -> impl Strategy<Value = VectorPoly> {
    let size = degree.box_size();
    proptest::collection::vec(proptest::collection::vec((finite(), finite()), size), 0..3).prop_map(move |entries| {
        let e = entries
            .into_iter()
            .map(|cs| AnalyticPoly::from_dense(degree, &cs.into_iter().map(|(a, b)| C64::new(a, b)).collect::<Vec<_>>()))
            .collect();
        VectorPoly::new(degree, e).unwrap()
    })
}

fn wild() -> impl Strategy<Value = f64> {
    prop_oneof![finite(), Just(f64::NAN), Just(f64::INFINITY), Just(f64::NEG_INFINITY)]
}

fn metadata() -> impl Strategy<Value = Metadata> {
    (
        wild(),
        wild(),
        0usize..1000,
        proptest::collection::vec(wild(), 0..3),
        proptest::collection::vec((0..3i32, 0..3i32, 0..3usize, any::<bool>(), wild(), proptest::option::of("[a-z ]{0,12}")), 0..4),
        proptest::option::of("[0-9:a-z]{1,16}"),
    )
        .prop_map(|(er, hr, it, shifts, trace, ts)| Metadata {
            e_route: "gram".into(),
            e_residual: er,
            h_residual: hr,
            h_iterations: it,
            eps_shifts: shifts,
            square_counts: [1, 2, 3],
            search_trace: trace
                .into_iter()
                .map(|(r, s, k, success, residual, note)| Attempt {
                    r,
                    s,
                    route: [Route::Lemma, Route::Scalar, Route::Gram][k],
                    success,
                    residual,
                    iterations: it,
                    note,
                })
                .collect(),
            stability: "stable \"quoted\" \\ text".into(),
            v_unitarity: f64::NAN,
            warnings: vec!["w\nmultiline".into()],
            timestamp: ts,
        })
}

fn certificate() -> impl Strategy<Value = AglerCertificate> {
    (0..3i32, 0..3i32, 0..2i32, 0..2i32).prop_flat_map(|(n, m, r, s)| {
        let p = poly(3).prop_map(move |q| {
            let d = MultiIndex::new(&[n, m, 1]);
            AnalyticPoly::from_terms(d, q.terms().filter(|(i, _)| i.in_box(&d)).map(|(i, c)| (*i, *c))).unwrap()
        });
        let (nn, mm) = (n + r, m + s);
        (
            p,
            vector(MultiIndex::new(&[nn, mm])),
            vector(MultiIndex::new(&[(nn - 1).max(0), mm, 1])),
            vector(MultiIndex::new(&[nn, (mm - 1).max(0), 1])),
            metadata(),
        )
            .prop_map(move |(p, e, h1, h2, metadata)| AglerCertificate { p, r, s, e, h1, h2, metadata })
    })
}

fn report() -> impl Strategy<Value = Report> {
    (any::<bool>(), wild(), wild(), proptest::collection::vec((any::<bool>(), wild(), wild(), ".{0,20}"), 0..5)).prop_map(
        |(pass, cr, pr, checks)| Report {
            pass,
            coefficient_residual: cr,
            point_residual: pr,
            scale: 1.0,
            square_counts: [2, 0, 7],
            checks: checks
                .into_iter()
                .enumerate()
                .map(|(k, (passed, value, limit, detail))| Check {
                    name: format!("check_{k}"),
                    hard: k % 2 == 0,
                    passed,
                    value,
                    limit,
                    detail,
                })
                .collect(),
        },
    )
}

proptest! {
    #[test]
    fn poly_round_trip(p in (1usize..=3).prop_flat_map(poly)) {
        let text = write_poly(&p);
        let back = read_poly(&text).unwrap();
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(write_poly(&back), text);
    }

    #[test]
    fn certificate_round_trip(c in certificate()) {
        let text = write_certificate(&c);
        let back = read_certificate(&text).unwrap();
        prop_assert_eq!(&back.p, &c.p);
        prop_assert_eq!(&back.e, &c.e);
        prop_assert_eq!(&back.h1, &c.h1);
        prop_assert_eq!(&back.h2, &c.h2);
        prop_assert_eq!(back.metadata.search_trace.len(), c.metadata.search_trace.len());
        prop_assert_eq!(write_certificate(&back), text);
    }

    #[test]
    fn report_round_trip(r in report()) {
        let text = write_report(&r);
        let back = read_report(&text).unwrap();
        prop_assert_eq!(back.pass, r.pass);
        prop_assert_eq!(back.checks.len(), r.checks.len());
        prop_assert_eq!(write_report(&back), text);
    }
}

#[test]
fn finite_values_compare_equal_in_memory() {
    let r = Report {
        pass: true,
        coefficient_residual: 1e-17,
        point_residual: 0.0,
        scale: 4.0,
        square_counts: [2, 0, 2],
        checks: vec![Check {
            name: "coefficient_residual".into(),
            hard: true,
            passed: true,
            value: 1e-17,
            limit: 4e-8,
            detail: String::new(),
        }],
    };
    assert_eq!(read_report(&write_report(&r)).unwrap(), r);
}
