use num_rational::Ratio;
use proptest::prelude::*;
use reward_rating::{
    verify_ledger, winner_set, EventKind, Identity, Market, MarketParams, Money, WeightFn,
};

#[derive(Debug, Clone)]
enum Op {
    Buy { who: u8, rating: u8 },
    Sell { who: u8, rating: u8 },
}

fn ops(n: u8) -> impl Strategy<Value = Vec<Op>> {
    let op = prop_oneof![
        3 => (0u8..6, 1..=n).prop_map(|(who, rating)| Op::Buy { who, rating }),
        1 => (0u8..6, 1..=n).prop_map(|(who, rating)| Op::Sell { who, rating }),
    ];
    proptest::collection::vec(op, 0..80)
}

fn market_case() -> impl Strategy<Value = (MarketParams, Vec<Op>)> {
    (
        prop_oneof![Just(3u8), Just(5u8), Just(9u8)],
        1i64..=1_000_000,
        1i64..=1_000,
        0u32..=3,
        any::<bool>(),
        proptest::option::of(1i64..=2_000_000),
    )
        .prop_flat_map(|(n, gamma, beta, decimals, f2, cap)| {
            let wf = if f2 { WeightFn::F2 } else { WeightFn::F1 };
            let mut p =
                MarketParams::new(n, Money(beta + gamma), Money(beta), decimals, wf).unwrap();
            p.profit_cap = cap.map(Money);
            (Just(p), ops(n))
        })
}

fn apply(market: &mut Market, op: &Op) {
    match *op {
        Op::Buy { who, rating } => {
            market
                .buy_coin(&Identity::new(format!("u{who}")), rating)
                .unwrap();
        }
        Op::Sell { who, rating } => {
            let _ = market.sell_coin(&Identity::new(format!("u{who}")), rating);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn every_mint_is_budget_balanced((params, ops) in market_case()) {
        let mut market = Market::new(params.clone()).unwrap();
        for op in &ops {
            let before = market.state().clone();
            apply(&mut market, op);
            let st = market.state();
            prop_assert_eq!(st.reserve, params.beta * st.total_coins());
            if let Some(ev) = market.journal().iter().rev().find(|e| e.seq == before.seq + 1) {
                if let Some(plan) = &ev.plan {
                    prop_assert_eq!(plan.distributed(&before.counts) + plan.owner_remainder, params.gamma);
                }
            }
        }
        let report = verify_ledger(market.journal(), &params).unwrap();
        prop_assert!(report.is_balanced(), "{}", report);
        let st = market.state();
        prop_assert_eq!(report.reserve, st.reserve);
        prop_assert_eq!(report.owner_balance, st.owner_balance);
        prop_assert_eq!(report.stakeholder_credits, st.stakeholder_credits);
    }

    #[test]
    fn cash_is_conserved((params, ops) in market_case()) {
        let mut market = Market::new(params).unwrap();
        for op in &ops {
            apply(&mut market, op);
        }
        let cash_in: Money = market.journal().iter().map(|e| e.cash_in).sum();
        let cash_out: Money = market.journal().iter().map(|e| e.cash_out).sum();
        let st = market.state();
        prop_assert_eq!(cash_in - cash_out, st.reserve + st.owner_balance + st.stakeholder_credits);
        let credited: Money = st.book.all_credits().values().copied().sum();
        prop_assert_eq!(credited, st.stakeholder_credits);
        for r in 1..=market.params().n {
            prop_assert_eq!(st.book.count_for_rating(r), st.count(r));
        }
        if let Some(cap) = market.params().profit_cap {
            for lot in st.book.lots() {
                prop_assert!(st.book.accrued_profit_per_coin(lot) < cap);
            }
        }
    }

    #[test]
    fn replay_is_deterministic((params, ops) in market_case()) {
        let mut market = Market::new(params.clone()).unwrap();
        for op in &ops {
            apply(&mut market, op);
        }
        let lines: Vec<String> = market.journal().iter().map(|e| e.to_json_line()).collect();
        let text = lines.join("\n");
        let events = reward_rating::read_journal(text.as_bytes()).unwrap();
        let rebuilt = Market::replay(params, &events).unwrap();
        prop_assert_eq!(rebuilt, market);
    }

    #[test]
    fn score_moves_toward_the_minted_rating(
        counts in proptest::collection::vec(0u64..30, 5),
        j in 1u8..=5,
    ) {
        let mut market = Market::new(MarketParams::worked_example()).unwrap();
        for (i, &c) in counts.iter().enumerate() {
            for k in 0..c {
                market.buy_coin(&Identity::new(format!("s{i}-{k}")), i as u8 + 1).unwrap();
            }
        }
        let before = market.score();
        market.buy_coin(&Identity::new("x"), j).unwrap();
        let after = *market.score().unwrap().value();
        prop_assert!(after >= Ratio::from_integer(1) && after <= Ratio::from_integer(5));
        if let Some(before) = before {
            let b = *before.value();
            let jr = Ratio::from_integer(j as i128);
            if jr > b { prop_assert!(after > b); }
            if jr < b { prop_assert!(after < b); }
            if jr == b { prop_assert_eq!(after, b); }
        }
    }

    #[test]
    fn payouts_shrink_with_distance_and_respect_direction(
        counts in proptest::collection::vec(0u64..40, 5..=9),
        j_pick in 0usize..9,
        f2 in any::<bool>(),
    ) {
        let n = counts.len() as u8;
        let j = (j_pick % n as usize) as u8 + 1;
        let wf = if f2 { WeightFn::F2 } else { WeightFn::F1 };
        let params = MarketParams::new(n, Money(1_000), Money(400), 2, wf).unwrap();
        let mut market = Market::new(params.clone()).unwrap();
        for (i, &c) in counts.iter().enumerate() {
            for k in 0..c {
                market.buy_coin(&Identity::new(format!("s{i}-{k}")), i as u8 + 1).unwrap();
            }
        }
        let Some(sigma) = market.score() else { return Ok(()); };
        let plan = market.state().compute_distribution(j, &params).unwrap();
        prop_assert_eq!(&plan.winners, &winner_set(&sigma, j, n));
        prop_assert!(!plan.winners.is_empty());
        let pub_sigma = sigma.published().to_ratio();
        let jr = Ratio::from_integer(j as i128);
        for &w in &plan.winners {
            let wr = Ratio::from_integer(w as i128);
            if jr > pub_sigma { prop_assert!(wr > pub_sigma); }
            if jr < pub_sigma { prop_assert!(wr < pub_sigma); }
        }
        let mut by_distance: Vec<(u8, Money)> = plan
            .per_coin_payout
            .iter()
            .map(|(&w, &p)| ((w as i16 - j as i16).unsigned_abs() as u8, p))
            .collect();
        by_distance.sort();
        for pair in by_distance.windows(2) {
            prop_assert!(pair[0].1 >= pair[1].1 || pair[0].0 == pair[1].0);
            if pair[0].0 == pair[1].0 {
                prop_assert_eq!(pair[0].1, pair[1].1);
            }
        }
    }
}

#[test]
fn up_mints_never_pay_coins_at_or_below_the_score() {
    let mut market = Market::new(MarketParams::worked_example()).unwrap();
    for k in 0..20 {
        market.buy_coin(&Identity::new(format!("h{k}")), 2).unwrap();
    }
    let honest_credits = |m: &Market| -> Money {
        (0..20)
            .map(|k| m.state().book.credits_of(&Identity::new(format!("h{k}"))))
            .sum()
    };
    let before = honest_credits(&market);
    for k in 0..30 {
        let out = market
            .buy_coin(&Identity::new(format!("sybil{k}")), 5)
            .unwrap();
        assert_eq!(out.mint.kind, EventKind::Mint);
    }
    assert_eq!(honest_credits(&market), before);
}
