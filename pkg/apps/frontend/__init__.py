# Frontend package
