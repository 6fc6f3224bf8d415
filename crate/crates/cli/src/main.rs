fn main() {
    std::process::exit(qcrypto_tool::run(std::env::args_os()));
}
