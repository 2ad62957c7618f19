import pathlib  # Module for object-oriented filesystem paths


def prepare_output_file(target: str) -> pathlib.Path:
    """
    Expand a user-supplied output path (for `--emit-dag` or `--trace`), make sure
    its parent directory exists and return it.
    """
    path = pathlib.Path(target).expanduser()
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def write_output(target: str, text: str) -> pathlib.Path:
    path = prepare_output_file(target)
    path.write_text(text, encoding="utf-8")
    return path
