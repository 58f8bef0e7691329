//! The command-line tool driven in-process: generate, solve, bound,
//! validate and report into a scratch directory.

use std::path::Path;

fn tpossp(args: &[&str]) -> i32 {
    let argv = std::iter::once("tpossp").chain(args.iter().copied());
    let code = tpossp::cli::run(argv);
    println!("$ tpossp {} -> exit {code}", args.join(" "));
    code
}

fn main() {
    let dir = std::env::temp_dir().join(format!("tpossp-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = |name: &str| dir.join(name).to_string_lossy().into_owned();
    let inst = p("instance.json");
    let run = p("run");

    tpossp(&["generate", "--hubs", "8", "--schedules", "20", "--requests", "10", "--seed", "4", "--out", &inst]);
    tpossp(&["solve", &inst, "--mode", "stabilized", "--lagrangian", "--out", &run]);
    tpossp(&["bound", &inst, "--out", &p("bound.json")]);
    tpossp(&["validate", &p("run/instance.json"), &p("run/solution.json")]);
    tpossp(&["report", &p("run/instance.json"), &p("run/solution.json"), "--format", "csv", "--out", &p("tables")]);

    for f in ["tables/report.csv", "tables/schedules.csv"] {
        let path = Path::new(&dir).join(f);
        println!("--- {f}");
        print!("{}", std::fs::read_to_string(path).unwrap_or_default());
    }
    std::fs::remove_dir_all(&dir).ok();
}
