// Driving the command-line front end in-process.

use bellpoly::cli;

fn call(args: &[&str]) -> (i32, String) {
    let args: Vec<String> = std::iter::once("bellpoly").chain(args.iter().copied()).map(String::from).collect();
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(&args, &mut out, &mut err);
    (code, String::from_utf8_lossy(&out).into_owned() + &String::from_utf8_lossy(&err))
}

pub fn run_example() -> Result<(), String> {
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let pr1 = format!("{data}/pr1.json");
    let chained = format!("{data}/chained_n3.json");
    let runs: Vec<Vec<&str>> = vec![
        vec!["validate", &pr1],
        vec!["chsh", "--all", &pr1],
        vec!["decompose", &chained],
        vec!["eta-critical", &pr1],
        vec!["--format", "json", "tv-closest", &pr1],
        vec!["vertices", "--n", "2", "--verify"],
    ];
    for args in runs {
        let (code, text) = call(&args);
        println!("$ bellpoly {}\n{text}", args.join(" "));
        if code != 0 {
            return Err(format!("exit code {code}"));
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
