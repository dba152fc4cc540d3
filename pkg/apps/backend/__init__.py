# Backend: CLI, experiment configuration and CSV I/O
