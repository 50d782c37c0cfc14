mod support;

use cat_core::analysis::{
    render, strategy_distribution, success_by_schema, time_by_interaction, AgeBands, ReportFormat, SuccessCell,
};
use cat_core::scorer::AlgorithmDimension::{D0, D1, D2};
use proptest::prelude::*;
use support::fixtures::{dataset, Task};

#[test]
fn completion_time_table() {
    let d = dataset(
        &[("g1", Some(8)), ("g2", Some(8)), ("p1", Some(11))],
        &[
            Task::solved("g1", 1, 4.0, D1, "G"),
            Task::solved("g1", 2, 6.0, D1, "G"),
            Task::solved("g2", 1, 20.0, D2, "G"),
            Task::solved("p1", 1, 12.5, D2, "P"),
        ],
    );
    let r = time_by_interaction(&d);
    let g = r.rows.iter().find(|row| row.category == "G").unwrap();
    assert_eq!((g.students, g.avg, g.min, g.max), (2, 15, 10, 20));
    let p = r.rows.iter().find(|row| row.category == "P").unwrap();
    assert_eq!((p.avg, p.min, p.max), (13, 13, 13));
    let total = r.rows.last().unwrap();
    assert_eq!(total.category, "Total");
    assert_eq!((total.students, total.avg, total.min, total.max), (3, 14, 10, 20));
    assert!(r.rows.iter().all(|row| row.category != "GF" && row.category != "PF"));
    assert!(r.notices.contains(&"no GF students".to_string()));
    assert!(r.notices.contains(&"no PF students".to_string()));
    let text = render(&r, ReportFormat::Text);
    assert_eq!(
        text.lines().take(4).collect::<Vec<_>>(),
        vec![
            "interaction  students  avg_min  min_min  max_min",
            "------------------------------------------------",
            "G                   2       15       10       20",
            "P                   1       13       13       13",
        ]
    );
    assert_eq!(render(&r, ReportFormat::Csv).lines().nth(1), Some("G,2,15,10,20"));
}

#[test]
fn majority_interaction_decides_the_row() {
    let d = dataset(
        &[("s", Some(9))],
        &[
            Task::solved("s", 1, 1.0, D1, "PF"),
            Task::solved("s", 2, 1.0, D1, "PF"),
            Task::solved("s", 3, 9.0, D1, "G"),
        ],
    );
    let r = time_by_interaction(&d);
    assert_eq!(r.rows[0].category, "PF");
    assert_eq!((r.rows[0].avg, r.rows[0].min, r.rows[0].max), (11, 11, 11));
    assert!(time_by_interaction(&dataset(&[], &[])).rows.is_empty());
}

#[test]
fn success_table() {
    let mut students: Vec<(&'static str, Option<u32>)> = Vec::new();
    let mut tasks = Vec::new();
    const YOUNG: [&str; 6] = ["y0", "y1", "y2", "y3", "y4", "y5"];
    const OLD: [&str; 24] = [
        "o00", "o01", "o02", "o03", "o04", "o05", "o06", "o07", "o08", "o09", "o10", "o11", "o12", "o13", "o14",
        "o15", "o16", "o17", "o18", "o19", "o20", "o21", "o22", "o23",
    ];
    for (i, id) in YOUNG.iter().enumerate() {
        students.push((id, Some(5)));
        tasks.push(if i < 3 { Task::solved(id, 1, 2.0, D0, "GF") } else { Task::failed(id, 1) });
    }
    for (i, id) in OLD.iter().enumerate() {
        students.push((id, Some(11)));
        tasks.push(if i < 22 { Task::solved(id, 2, 2.0, D1, "P") } else { Task::failed(id, 2) });
        let mut navigated = Task::failed(id, 3);
        navigated.attempted = false;
        tasks.push(navigated);
    }
    students.push(("unknown", None));
    tasks.push(Task::solved("unknown", 1, 1.0, D1, "G"));
    let d = dataset(&students, &tasks);
    let bands: AgeBands = "3-6,10-13".parse().unwrap();
    let r = success_by_schema(&d, &bands);
    assert_eq!(r.columns, vec!["3-6", "10-13", "unassigned", "Total"]);
    assert_eq!(r.group_sizes, vec![6, 24, 1, 31]);
    assert_eq!(r.cells[0][0].to_string(), "3/6 (50%)");
    assert_eq!(r.cells[1][1].to_string(), "22/24 (92%)");
    assert_eq!(r.cells[1][0].to_string(), "0/0 (—)");
    assert_eq!(r.cells[2][1].to_string(), "0/0 (—)");
    assert_eq!(r.cells[0][2].to_string(), "1/1 (100%)");
    assert_eq!(r.cells[0][3].to_string(), "4/7 (57%)");
    assert_eq!(r.notices.len(), 1);
    let csv = render(&r, ReportFormat::Csv);
    assert_eq!(csv.lines().next(), Some("schema,3-6,10-13,unassigned,Total"));
    assert_eq!(csv.lines().nth(1), Some("V01,3/6 (50%),0/0 (—),1/1 (100%),4/7 (57%)"));
    let text = render(&r, ReportFormat::Text);
    assert!(text.contains("22/24 (92%)"));
    assert!(render(&r, ReportFormat::Json).contains("\"columns\""));
}

#[test]
fn strategy_matrix() {
    let d = dataset(
        &[("a", Some(11)), ("b", Some(11)), ("c", Some(5))],
        &[
            Task::solved("a", 1, 1.0, D1, "G"),
            Task::solved("a", 2, 1.0, D1, "G"),
            Task::solved("b", 1, 1.0, D1, "G"),
            Task::solved("b", 2, 1.0, D1, "G"),
            Task::solved("c", 1, 1.0, D1, "G"),
            Task::solved("c", 2, 1.0, D1, "G"),
            Task::solved("c", 3, 1.0, D2, "P"),
            Task::solved("c", 4, 1.0, D2, "P"),
        ],
    );
    let r = strategy_distribution(&d, &"3-6,7-9,10-13".parse().unwrap());
    assert_eq!(r.groups.len(), 2);
    let young = &r.groups[0];
    assert_eq!(young.label, "3-6");
    assert_eq!(young.percentages[1][1], 50);
    assert_eq!(young.percentages[2][3], 50);
    let old = &r.groups[1];
    assert_eq!(old.percentages[1][1], 100);
    assert_eq!(old.percentages.iter().flatten().sum::<u64>(), 100);
    assert_eq!(r.warnings.len(), 1);
    assert!(r.warnings[0].contains("not allowed to use the visual programming interface"));
    assert!(r.notices.iter().any(|n| n.contains("7-9")));
    let text = render(&r, ReportFormat::Text);
    assert!(text.lines().next().unwrap().starts_with("group  algorithm  GF"));
}

#[test]
fn thirds_sum_to_100() {
    let d = dataset(
        &[("a", Some(11))],
        &[Task::solved("a", 1, 1.0, D0, "G"), Task::solved("a", 2, 1.0, D1, "G"), Task::solved("a", 3, 1.0, D2, "G")],
    );
    let r = strategy_distribution(&d, &"10-13".parse().unwrap());
    let shares: Vec<u64> = r.groups[0].percentages.iter().map(|row| row[1]).collect();
    assert_eq!(shares, vec![34, 33, 33]);
}

fn arb_tasks() -> impl Strategy<Value = Vec<(usize, usize, bool, bool, u8, u8)>> {
    prop::collection::vec((0usize..8, 1usize..=12, any::<bool>(), any::<bool>(), 0u8..3, 0u8..4), 0..80)
}

const IDS: [&str; 8] = ["s0", "s1", "s2", "s3", "s4", "s5", "s6", "s7"];

proptest! {
    #[test]
    fn report_invariants(ages in prop::collection::vec(prop::option::of(3u32..15), 8), raw in arb_tasks()) {
        let students: Vec<(&'static str, Option<u32>)> = IDS.iter().copied().zip(ages).collect();
        let mut seen = std::collections::BTreeSet::new();
        let mut tasks = Vec::new();
        for (s, i, attempted, solved, d, inter) in raw {
            if !seen.insert((s, i)) {
                continue;
            }
            let mut t = Task::solved(IDS[s], i, 1.5, [D0, D1, D2][d as usize], ["GF", "G", "PF", "P"][inter as usize]);
            t.attempted = attempted || solved;
            t.solved = solved;
            tasks.push(t);
        }
        let d = dataset(&students, &tasks);
        let bands: AgeBands = "3-6,7-9,10-13".parse().unwrap();
        let s = success_by_schema(&d, &bands);
        for row in &s.cells {
            for (cell, size) in row.iter().zip(&s.group_sizes) {
                let SuccessCell { solved, attempted } = *cell;
                prop_assert!(solved <= attempted && attempted <= *size);
            }
        }
        let st = strategy_distribution(&d, &bands);
        for g in &st.groups {
            let sum: u64 = g.percentages.iter().flatten().sum();
            prop_assert!((99..=101).contains(&sum));
        }
        prop_assert_eq!(render(&st, ReportFormat::Csv), render(&strategy_distribution(&d, &bands), ReportFormat::Csv));
        let t = time_by_interaction(&d);
        for row in &t.rows {
            prop_assert!(row.min <= row.avg && row.avg <= row.max);
        }
    }
}
