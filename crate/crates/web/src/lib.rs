//! Browser bindings. Each exported function takes a group spec string and
//! returns a JSON document; failures come back as `{"error": "..."}`.
//! The `*_json` functions hold the logic and run natively as well.

use pgroup_core::corpus::parse_checks;
use pgroup_core::series::{
    commutator_subgroup, lower_central_series, nilpotency_class, omega_set, omega_subgroup, power_subgroup,
};
use pgroup_core::verifier::{run_checks, CheckId, GroupContext, Status, SweepPolicy};
use pgroup_core::{BuildOptions, GroupSpec, GroupTable, SubgroupSet};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest group the page will build.
pub const MAX_ORDER: usize = 1024;
/// Largest group whose full table is sent to the page.
pub const MAX_TABLE_ORDER: usize = 256;

fn build(spec: &str) -> Result<GroupTable, String> {
    let spec: GroupSpec = spec.trim().parse().map_err(|e| format!("{e}"))?;
    let opts = BuildOptions { order_cap: MAX_ORDER, ..BuildOptions::default() };
    spec.build(&opts).map_err(|e| format!("{e}"))
}

fn render(result: Result<Value, String>) -> String {
    result.unwrap_or_else(|e| json!({ "error": e })).to_string()
}

/// Order, exponent, powerfulness and the sizes of the omega, agemo and
/// lower central series terms.
pub fn describe_json(spec: &str) -> Result<Value, String> {
    let g = build(spec)?;
    let whole = SubgroupSet::whole(&g);
    let e = g.exponent_log();
    let levels: Vec<Value> = (0..=e)
        .map(|i| {
            json!({
                "i": i,
                "omega_set": omega_set(&whole, i as i64).size(),
                "omega_subgroup": omega_subgroup(&whole, i as i64).size(),
                "agemo": power_subgroup(&g, i).size(),
            })
        })
        .collect();
    let lcs: Vec<usize> = lower_central_series(&whole, usize::MAX).iter().map(SubgroupSet::size).collect();
    Ok(json!({
        "label": g.label(),
        "prime": g.prime(),
        "order": g.order(),
        "exponent": g.group_exponent(),
        "powerful": pgroup_core::is_powerful(&g),
        "abelian": g.is_abelian(),
        "derived": commutator_subgroup(&whole, &whole).size(),
        "class": nilpotency_class(&whole),
        "generators": g.generator_names(),
        "levels": levels,
        "lower_central_series": lcs,
    }))
}

/// The multiplication table as a flat row-major array of element indices,
/// with each element's word and order.
pub fn cayley_json(spec: &str) -> Result<Value, String> {
    let g = build(spec)?;
    if g.order() > MAX_TABLE_ORDER {
        return Err(format!("order {} is above the table limit {MAX_TABLE_ORDER}", g.order()));
    }
    let table: Vec<u32> =
        g.elements().flat_map(|x| g.elements().map(move |y| (x, y))).map(|(x, y)| g.mul(x, y).index() as u32).collect();
    Ok(json!({
        "label": g.label(),
        "order": g.order(),
        "words": g.elements().map(|x| g.word_string(x)).collect::<Vec<_>>(),
        "orders": g.elements().map(|x| g.element_order(x)).collect::<Vec<_>>(),
        "table": table,
    }))
}

/// Runs the listed checks (comma-separated ids, empty for all) exhaustively
/// up to order 256 and on 2000 seeded samples above.
pub fn checks_json(spec: &str, checks: &str) -> Result<Value, String> {
    let g = build(spec)?;
    let ids = if checks.trim().is_empty() { CheckId::ALL.to_vec() } else { parse_checks(checks)? };
    let ctx = GroupContext::new(&g);
    let policy = SweepPolicy { sample_count: 2000, ..SweepPolicy::default() };
    let reports = run_checks(&ctx, &ids, &policy);
    let failed = reports.iter().filter(|r| r.status == Status::Fail).count();
    Ok(json!({
        "label": g.label(),
        "powerful": ctx.powerful,
        "failed": failed,
        "records": serde_json::to_value(&reports).map_err(|e| e.to_string())?,
    }))
}

/// Check ids with their descriptions.
pub fn check_list_json() -> Value {
    CheckId::ALL.iter().map(|c| json!({ "id": c.as_str(), "description": c.description() })).collect()
}

#[wasm_bindgen]
pub fn describe(spec: &str) -> String {
    render(describe_json(spec))
}

#[wasm_bindgen]
pub fn cayley(spec: &str) -> String {
    render(cayley_json(spec))
}

#[wasm_bindgen]
pub fn checks(spec: &str, ids: &str) -> String {
    render(checks_json(spec, ids))
}

#[wasm_bindgen]
pub fn check_list() -> String {
    check_list_json().to_string()
}
