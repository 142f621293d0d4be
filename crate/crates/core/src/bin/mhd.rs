fn main() {
    std::process::exit(rtdg_mhd::app::main_with_args(std::env::args_os()));
}
