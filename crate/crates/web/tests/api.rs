use pgroup_web::{cayley, cayley_json, check_list_json, checks_json, describe, describe_json, MAX_TABLE_ORDER};
use serde_json::Value;

#[test]
fn describes_q8() {
    let d = describe_json("quaternion m=3").unwrap();
    assert_eq!(d["order"], 8);
    assert_eq!(d["exponent"], 4);
    assert_eq!(d["powerful"], false);
    assert_eq!(d["class"], 2);
    assert_eq!(d["lower_central_series"], serde_json::json!([8, 2, 1]));
    let level1 = &d["levels"][1];
    assert_eq!((level1["omega_set"].as_u64(), level1["agemo"].as_u64()), (Some(2), Some(2)));
}

#[test]
fn describes_powerful_group_with_matching_counts() {
    let d = describe_json("semidirect p=3 m=2 n=1 t=4").unwrap();
    assert_eq!(d["powerful"], true);
    let order = d["order"].as_u64().unwrap();
    for l in d["levels"].as_array().unwrap() {
        assert_eq!(order / l["agemo"].as_u64().unwrap(), l["omega_set"].as_u64().unwrap());
    }
}

#[test]
fn cayley_table_is_a_latin_square() {
    let t = cayley_json("dihedral m=3").unwrap();
    let n = t["order"].as_u64().unwrap() as usize;
    let table: Vec<usize> = t["table"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap() as usize).collect();
    assert_eq!(table.len(), n * n);
    for x in 0..n {
        let mut row: Vec<usize> = table[x * n..(x + 1) * n].to_vec();
        row.sort_unstable();
        assert_eq!(row, (0..n).collect::<Vec<_>>());
        assert_eq!(table[x * n], x);
    }
    assert_eq!(t["words"][0], "1");
}

#[test]
fn errors_are_reported_as_json() {
    let v: Value = serde_json::from_str(&describe("semidirect p=2 m=4 n=1 t=3")).unwrap();
    assert!(v["error"].as_str().unwrap().contains("invalid twist"));
    let v: Value = serde_json::from_str(&cayley("cyclic p=2 m=9")).unwrap();
    assert!(v["error"].as_str().unwrap().contains(&MAX_TABLE_ORDER.to_string()));
    assert!(describe_json("cyclic p=2 m=11").is_err());
    assert!(checks_json("cyclic p=2 m=2", "T1i,nope").is_err());
}

#[test]
fn runs_checks() {
    let out = checks_json("dihedral m=3", "T2").unwrap();
    assert_eq!(out["failed"], 0);
    let records = out["records"].as_array().unwrap();
    assert_eq!(records.len(), 1);
    assert_eq!(records[0]["status"], "skipped:not_powerful");

    let all = checks_json("congruence p=2 dim=2 k=3", "").unwrap();
    assert_eq!(all["powerful"], true);
    assert_eq!(all["failed"], 0);
    assert!(all["records"].as_array().unwrap().len() > 16);
    assert_eq!(check_list_json().as_array().unwrap().len(), 16);
}
