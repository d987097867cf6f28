//! Exact privacy accounting: spends are rationals, so splitting a budget and
//! spending the pieces exhausts it exactly.

use dpslr::{BudgetLedger, PrivacyBudget, Spend};

fn main() -> dpslr::Result<()> {
    let total = PrivacyBudget::pure(1.0)?;
    let piece = total.to_spend().split(3);
    let mut ledger = BudgetLedger::new(&total);
    for i in 0..3 {
        ledger = ledger.spend(&format!("step{i}"), piece.clone())?;
    }
    println!("three spends of {piece}: exhausted = {}", ledger.is_exhausted());
    println!("one more: {}", ledger.spend("extra", Spend::epsilon(1e-12)?).unwrap_err());

    let zcdp = BudgetLedger::new(&PrivacyBudget::zcdp(0.5)?).spend("gaussian", Spend::rho(0.5)?)?;
    println!("{}", serde_json::to_string(&zcdp).expect("serializable"));
    Ok(())
}
