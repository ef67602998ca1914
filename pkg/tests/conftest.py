from hypothesis import settings

# numerical examples have uneven runtimes; determinism matters more than speed
settings.register_profile("default", deadline=None, derandomize=True)
settings.load_profile("default")


_VERDICTS = []


def record_verdict(line: str) -> None:
    _VERDICTS.append(line)


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(_VERDICTS, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
