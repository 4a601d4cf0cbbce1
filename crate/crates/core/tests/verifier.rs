use std::collections::BTreeMap;

use pgroup_core::verifier::*;
use pgroup_core::*;

fn build(spec: &str) -> GroupTable {
    spec.parse::<GroupSpec>().unwrap().build(&BuildOptions::default()).unwrap()
}

fn counts_by_check(reports: &[CheckReport]) -> BTreeMap<&'static str, usize> {
    let mut m = BTreeMap::new();
    for r in reports {
        *m.entry(r.check_id.as_str()).or_default() += 1;
    }
    m
}

#[test]
fn record_count_for_cyclic_27_group() {
    // p = 3, e = 2, abelian: every Omega_i(G) has class 0
    let g = build("cyclic p=3 m=2");
    let ctx = GroupContext::new(&g);
    let reports = run_checks(&ctx, CheckId::ALL, &SweepPolicy::default());
    let e = 3usize;
    let expected: BTreeMap<&str, usize> = [
        ("T1i", e),
        ("T1ii", e * e * e),
        ("T1iii", e),
        ("T1iv", 1),
        ("C1", 1),
        ("C2", 1),
        ("L1", e - 1),
        ("T2", e),
        ("T2_X", 1),
        ("T2_even", 1),
        ("HALL1", e),
        ("HALL2", e),
        ("R1", 1),
        ("R2", e),
        ("R3", e),
        ("SHARP", 1),
    ]
    .into_iter()
    .collect();
    assert_eq!(counts_by_check(&reports), expected);
    assert_eq!(reports.len(), 57);
    assert!(reports.iter().all(|r| r.status != Status::Fail));
    for id in ["T1iv", "C1", "C2", "SHARP"] {
        let r = reports.iter().find(|r| r.check_id.as_str() == id).unwrap();
        assert_eq!(r.status.to_string(), "skipped:requires_p_2");
    }
}

#[test]
fn every_check_reports_on_every_group() {
    for spec in ["cyclic p=2 m=1", "quaternion m=3", "semidirect p=2 m=3 n=1 t=5", "extraspecial p=5"] {
        let g = build(spec);
        let ctx = GroupContext::new(&g);
        for &check in CheckId::ALL {
            let reports = run_check(&ctx, check, &SweepPolicy::default());
            assert!(!reports.is_empty(), "{spec} {check}");
            assert!(reports.iter().all(|r| r.group_label == g.label() && r.check_id == check));
        }
    }
}

#[test]
fn hypothesis_gating() {
    let q8 = build("quaternion m=3");
    let reports = run_checks(&GroupContext::new(&q8), CheckId::ALL, &SweepPolicy::default());
    for r in &reports {
        let expected = match r.check_id {
            CheckId::Hall1 | CheckId::Hall2 => "pass",
            CheckId::T1iii | CheckId::R1 | CheckId::R3 => "skipped:requires_odd_p",
            _ => "skipped:not_powerful",
        };
        assert_eq!(r.status.to_string(), expected, "{}", r.check_id);
    }
    let t2 = reports.iter().find(|r| r.check_id == CheckId::T2).unwrap();
    assert!(t2.witness.as_ref().unwrap().detail.contains("|G:G^(p^i)| = 4 vs |Omega_{i}(G)| = 2"));

    let heis = build("extraspecial p=3");
    let reports =
        run_checks(&GroupContext::new(&heis), &[CheckId::Sharp, CheckId::T1iv, CheckId::T1i], &SweepPolicy::default());
    let statuses: Vec<String> = reports.iter().map(|r| r.status.to_string()).collect();
    assert_eq!(statuses, ["skipped:requires_p_2", "skipped:requires_p_2", "skipped:not_powerful"]);
}

#[test]
fn dihedral_negative_control_detail() {
    let d8 = build("dihedral m=3");
    let t2 = run_check(&GroupContext::new(&d8), CheckId::T2, &SweepPolicy::default());
    assert_eq!(t2.len(), 1);
    assert_eq!(t2[0].status.to_string(), "skipped:not_powerful");
    assert_eq!(t2[0].witness.as_ref().unwrap().detail, "negative control: i=1: |G:G^(p^i)| = 4 vs |Omega_{i}(G)| = 6");
}

#[test]
fn forced_hypothesis_failures_recheck() {
    let q8 = build("quaternion m=3");
    let ctx = GroupContext::with_hypothesis(&q8, true);
    let l1 = run_check(&ctx, CheckId::L1, &SweepPolicy::default());
    let failed: Vec<&CheckReport> = l1.iter().filter(|r| r.status == Status::Fail).collect();
    assert!(!failed.is_empty());
    for r in failed {
        let w = r.witness.as_ref().unwrap();
        let (x, y) = (w.element("x").unwrap(), w.element("y").unwrap());
        // independent recomputation: (xy)^(p^i) against x^(p^i) y^(p^i) by repeated multiplication
        let n = 2i64.pow(r.params.i.unwrap() as u32);
        let naive = |z: Elem| (0..n).fold(Elem::IDENTITY, |acc, _| q8.mul(acc, z));
        assert_ne!(naive(q8.mul(x, y)), q8.mul(naive(x), naive(y)));
        assert_eq!(recheck_witness(&q8, r), Ok(true));
    }

    let d8 = build("dihedral m=3");
    let ctx = GroupContext::with_hypothesis(&d8, true);
    let mut any_fail = false;
    for check in [CheckId::T2, CheckId::C2, CheckId::T1i] {
        for r in run_check(&ctx, check, &SweepPolicy::default()) {
            if r.status == Status::Fail {
                any_fail = true;
                assert_eq!(recheck_witness(&d8, &r), Ok(true), "{} {:?}", r.check_id, r.params);
            }
        }
    }
    assert!(any_fail);
}

#[test]
fn passing_reports_do_not_recheck() {
    let g = build("semidirect p=3 m=2 n=1 t=4");
    let policy = SweepPolicy { exhaustive_threshold: 0, sample_count: 50, seed: 7 };
    let hall = run_check(&GroupContext::new(&g), CheckId::Hall1, &policy);
    assert!(hall.iter().all(|r| r.status == Status::Pass && r.witness.is_none()));
    assert!(recheck_witness(&g, &hall[0]).is_err());
    assert!(matches!(hall[0].mode, Mode::Sampled { count: 50, seed: 7 }));
}

#[test]
fn sampled_sweeps_are_seeded() {
    let g = build("congruence p=3 dim=2 k=2");
    let policy = SweepPolicy { exhaustive_threshold: 16, sample_count: 300, seed: 11 };
    let a = run_checks(&GroupContext::new(&g), &[CheckId::T1i, CheckId::Hall2], &policy);
    let b = run_checks(&GroupContext::new(&g), &[CheckId::T1i, CheckId::Hall2], &policy);
    assert_eq!(a, b);
    assert!(a.iter().all(|r| r.status == Status::Pass));
}

#[test]
fn report_json_shape() {
    let g = build("cyclic p=2 m=2");
    let r = &run_check(&GroupContext::new(&g), CheckId::T2, &SweepPolicy::default())[1];
    let json = serde_json::to_string(r).unwrap();
    assert_eq!(
        json,
        r#"{"group_label":"cyclic p=2 m=2","check_id":"T2","params":{"i":1},"status":"pass","mode":"exhaustive"}"#
    );
    let skipped = &run_check(&GroupContext::new(&g), CheckId::R1, &SweepPolicy::default())[0];
    assert!(serde_json::to_string(skipped).unwrap().contains(r#""status":"skipped:requires_odd_p""#));
}

#[test]
fn check_ids_round_trip() {
    assert_eq!(CheckId::ALL.len(), 16);
    for &c in CheckId::ALL {
        assert_eq!(c.as_str().parse::<CheckId>(), Ok(c));
        assert!(!c.description().is_empty());
    }
    assert!("T3".parse::<CheckId>().is_err());
}

#[test]
fn sharpness_search_on_controls() {
    let groups: Vec<GroupTable> =
        ["cyclic p=2 m=3", "abelian p=2 type=[2,2]", "semidirect p=2 m=3 n=1 t=5", "quaternion m=3"]
            .iter()
            .map(|s| build(s))
            .collect();
    assert!(sharpness_search(&groups).is_empty());
}
