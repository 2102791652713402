//! Every intermediate quantity of the hardness balancing for a domain with
//! 3 easy, 5 medium, 30 hard and 21 too-hard instances.

use aspcomp::hardness::Class;
use aspcomp::selection::{balance, ClassQuantities};

type Row = (&'static str, fn(&ClassQuantities<Class>) -> i64);

pub fn run_example() -> anyhow::Result<()> {
    let sizes = [
        (Class::Easy, 3),
        (Class::Medium, 5),
        (Class::Hard, 30),
        (Class::TooHard, 21),
    ];
    let state = balance(&sizes, 20, 1)?;
    println!(
        "n = {}, m = {}, target = {}\n",
        state.n, state.m, state.target
    );

    let rows: [Row; 13] = [
        ("size", |c| c.size),
        ("gap", |c| c.gap),
        ("available<", |c| c.available_lt),
        ("available>", |c| c.available_gt),
        ("compensate<", |c| c.compensate_lt),
        ("compensate>", |c| c.compensate_gt),
        ("distribute<", |c| c.distribute_lt),
        ("distribute>", |c| c.distribute_gt),
        ("accumulate<", |c| c.accumulate_lt),
        ("accumulate>", |c| c.accumulate_gt),
        ("increase<", |c| c.increase_lt),
        ("increase>", |c| c.increase_gt),
        ("select", |c| c.select),
    ];
    print!("{:<12}", "");
    for c in &state.classes {
        print!("{:>9}", c.label.label());
    }
    println!();
    for (name, f) in rows {
        print!("{name:<12}");
        for c in &state.classes {
            print!("{:>9}", f(c));
        }
        println!();
    }
    println!(
        "\n{} mandated picks, {} left to free picks",
        state.total(),
        20 - state.total()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
