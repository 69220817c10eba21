# keeps this directory importable so test modules can share helpers.py
