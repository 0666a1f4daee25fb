VERSION = "0.3.0"
NAME = "lscstego"
